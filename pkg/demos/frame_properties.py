"""Print redundancy and frame bounds of the standard 2D and 3D profiles."""

from digishear import PROFILES, build_system_2d, build_system_3d

for name, shape in [("SL2D_1", (512, 512)), ("SL2D_2", (512, 512)),
                    ("SL3D_1", (32, 32, 32)), ("SL3D_2", (32, 32, 32))]:
    build = build_system_2d if len(shape) == 2 else build_system_3d
    system = build(shape, PROFILES[name])
    A, B = system.frame_bounds()
    print(f"{name}: {len(system):4d} filters on {'x'.join(map(str, shape))}, "
          f"A = {A:.4f}, B = {B:.4f}, B/A = {B / A:.2f}")

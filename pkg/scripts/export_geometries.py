"""Write the builtin geometries and sabotage fixtures as TOML geometry files.

The files round-trip exactly through `ncgcurv.geometries.load_geometry`, so
they are a starting point for hand-written geometries.

Run: python3 scripts/export_geometries.py [OUTDIR]   (default: geometries/)
"""

import argparse
from pathlib import Path

from ncgcurv.geometries import BUILTINS, SABOTAGE, load_geometry, resolve_geometry, save_geometry


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="geometries")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in list(BUILTINS) + list(SABOTAGE):
        spec = resolve_geometry(name)
        path = out / f"{name}.toml"
        save_geometry(spec, path)
        # fixtures may not validate, so reload without validation
        assert load_geometry(path, validate=False) == spec, name
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

"""Regenerate the example inputs in data/."""

from pathlib import Path

from polycurrents import io
from polycurrents.chains import Chain, boundary
from polycurrents.domain import l_shape, square_annulus, unit_square
from polycurrents.meshes import (
    annulus_generator,
    annulus_mesh,
    dirac,
    disk_mesh,
    interval_mesh,
    shrinking_loops,
    square_loop,
)
from polycurrents.spacetime import cone

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    DATA.mkdir(exist_ok=True)
    triangle = Chain.simplex([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    files = {
        "interval.json": interval_mesh().to_mesh_json(),
        "dirac_pm2.json": dirac([((2.0,), 1.0), ((-2.0,), -1.0)]).to_json(),
        "annulus.json": annulus_mesh().to_mesh_json(),
        "loops.json": io.sequence_json([annulus_generator() * (1.0 / j) for j in range(1, 11)]),
        "disk.json": disk_mesh().to_mesh_json(),
        "shrinking_loops.json": io.sequence_json(shrinking_loops(8), Chain(1, 2)),
        "triangle.json": triangle.to_json(),
        "square_loop.json": square_loop(1.0).to_json(),
        "cone.json": cone(boundary(triangle), (1 / 3, 1 / 3)).to_json(),
        "square.json": unit_square().to_json(),
        "lshape.json": l_shape().to_json(),
        "annulus_polygon.json": square_annulus().to_json(),
    }
    for name, obj in files.items():
        io.write_json(obj, DATA / name)


if __name__ == "__main__":
    main()

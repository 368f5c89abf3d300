"""Named presentation graphs used throughout the test-suite and the CLI."""

from __future__ import annotations

import random
from pathlib import Path

from .presentation import PresentationGraph, parse_presentation

__all__ = ['FIXTURES', 'fixture', 'fixture_path', 'random_graph', 'HEXAGON_AMALGAM_CONSTRAINTS']

DATA = Path(__file__).parent / 'data'

FIXTURES = {
    'p5': 'p5.racg',
    'hexagon': 'hexagon.racg',
    'square': 'square.racg',
    'octahedron': 'octahedron.racg',
    'path4': 'path4.racg',
    'five': 'five.racg',
    'six': 'six.racg',
    'hexagon_amalgam': 'hexagon_amalgam.racg',
}

# The amalgam fixture is a reconstruction from a verbal description only:
# two copies of a hyperbolic one-ended group G glued along a hexagon A, with
# the cone points x, x' each commuting with all of A.
HEXAGON_AMALGAM_CONSTRAINTS = (
    'a1..a6 induce a 6-cycle',
    'x and x2 are adjacent to every a_i',
    'the G side {x,y,z} and the copy {x2,y2,z2} share no edges',
    'each side together with A has no visual (Z2*Z2)^2 and no clique separator',
    '(A, A) with s=x, t=x2 is a virtual factor separator',
)


def fixture_path(name: str) -> Path:
    return DATA / FIXTURES[name]


def fixture(name: str) -> PresentationGraph:
    return parse_presentation(fixture_path(name).read_text())


def random_graph(seed: int, n: int, p: float = 0.5) -> PresentationGraph:
    """Erdos-Renyi graph on generators g0..g{n-1}, reproducible from seed."""
    rng = random.Random(seed)
    gens = [f'g{i}' for i in range(n)]
    edges = [(gens[i], gens[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return PresentationGraph.from_edges(gens, edges)

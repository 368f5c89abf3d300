"""Right-angled Coxeter groups: geodesics, walls, filters and boundary classification."""

__version__ = '0.1.0'

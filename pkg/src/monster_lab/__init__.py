"""Laboratory for random Gromov monsters at desk scale."""

__version__ = "0.1.0"

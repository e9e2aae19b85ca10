"""kacflow: exact verification of modified Kac matrix machinery and product hypersurface geometry."""

__version__ = "0.1.0"

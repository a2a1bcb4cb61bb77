"""Design and certification of sampling trajectory/manifold sets for bandlimited fields."""

__version__ = "0.1.0"

from .geometry import ConvexBody, Direction, fits_in_translate, support, width_direction

__all__ = [
    "ConvexBody",
    "Direction",
    "fits_in_translate",
    "support",
    "width_direction",
    "__version__",
]

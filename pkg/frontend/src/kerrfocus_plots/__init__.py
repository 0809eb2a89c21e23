"""Figure rendering for kerrfocus CSV outputs.

Three figure kinds: ring constellations (``rings``), filter-bank frequency
responses (``filters``) and rate-versus-SNR curves with fitted slopes
(``rates``).  Everything is driven purely by the documented CSV columns; no
model quantity is recomputed here.
"""

from .figures import (
    SchemaError,
    plot_filters,
    plot_rates,
    plot_rings,
    save_figure,
)

__all__ = ["SchemaError", "plot_filters", "plot_rates", "plot_rings", "save_figure"]
__version__ = "0.1.0"

"""Figure rendering for occupation-fraction bundles."""

__version__ = "0.1.0"

from .render import BundleError, FigureSpec, RenderResult, load_bundle, render_bundle

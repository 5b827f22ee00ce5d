"""scenedeck: script-to-visualization retrieval over an annotated movie catalog."""

from .attrql import AttributeQuery, parse_query, render_query
from .casting import VisualizationResult, visualize
from .catalog import Catalog, load_catalog, save_catalog
from .embeddings import EmbeddingStore, cosine, load_store, write_store
from .screenplay import Script, character_count, parse_script, render_script
from .synth import SynthSpec, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AttributeQuery", "Catalog", "EmbeddingStore", "Script", "SynthSpec",
    "VisualizationResult", "character_count", "cosine", "generate_synthetic",
    "load_catalog", "load_store", "parse_query", "parse_script", "render_query",
    "render_script", "save_catalog", "visualize", "write_store", "__version__",
]

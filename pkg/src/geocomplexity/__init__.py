"""Graph-based data approximators and their accuracy and complexity measures."""
from .accuracy import (
    Dataset,
    Line,
    first_principal_component,
    fvu_graph,
    fvu_line,
    mean_and_variance,
    point_to_segment_distance,
)
from .graph import (
    Barcode,
    EmbeddedGraph,
    Star,
    chain_graph,
    geometrical_complexity,
    graph_length,
    node_count,
    star_nonharmonicity,
    star_of,
    structural_barcode,
)
from .gsom import Chain, SomConfig, fit_gsom
from .principal_tree import ElasticConfig, GrammarOp, fit_principal_tree
from .report import FitReport

__version__ = "0.1.0"

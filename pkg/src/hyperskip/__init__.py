"""Graph embeddings in the Poincaré disk via negative-sampling skipgram."""

from .geometry import DiskPoint, NaturalPoint, circumference, inner, origin_distance, to_disk, to_natural
from .graphio import LabeledGraph, parse_edge_list, parse_gml, load_labels, read_graph, stats
from .walks import WalkCorpus, build_noise_table, draw_negatives, generate_walks, pairs
from .trainer import EmbeddingModel, TrainConfig, export, init_model, train, train_euclidean
from .evaluate import fit_logreg, macro_f1, make_splits, run_protocol

__version__ = "0.1.0"

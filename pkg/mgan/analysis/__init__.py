""" Analysis exports: credit weights, embeddings and their PCA projection """

from mgan.analysis.export import (
    AnalysisRecord,
    PcaRecord,
    analyze,
    weight_health_correlation,
    write_analysis_csv,
    write_pca_csv,
)
from mgan.analysis.pca import pca_components, pca_project

__all__ = [
    "AnalysisRecord",
    "PcaRecord",
    "analyze",
    "pca_components",
    "pca_project",
    "weight_health_correlation",
    "write_analysis_csv",
    "write_pca_csv",
]

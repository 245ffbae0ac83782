"""aquasift: merit-based late fusion of classifier scores plus density-based
topic discovery for labeled short-text corpora.

Main pieces:

* :mod:`aquasift.corpus` -- loading, cleaning, annotation merging, splitting.
* :mod:`aquasift.baseline` -- hashing TF-IDF logistic classifier (a stand-in
  scorer so the fusion pipeline runs without external models).
* :mod:`aquasift.fusion` -- weighted late fusion of per-model posteriors.
* :mod:`aquasift.optimize` -- PSO / Nelder-Mead / L-BFGS / Powell weight
  selection plus an exhaustive grid oracle.
* :mod:`aquasift.cluster` -- embeddings, PCA reduction, HDBSCAN.
* :mod:`aquasift.topics` -- class-based TF-IDF topic extraction.
* :mod:`aquasift.geo` -- gazetteer country/region mapping and grouping.
* :mod:`aquasift.cli` -- the ``aquasift`` command-line pipeline.
"""

__version__ = "0.1.0"


class AquasiftError(ValueError):
    """Raised for invalid inputs or contract violations anywhere in the package."""

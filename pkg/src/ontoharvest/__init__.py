"""ontoharvest: grow a domain ontology from an annotated text corpus.

The pipeline: tag raw text (or ingest CoNLL-U), match lexico-syntactic
templates against sentences anchored on base-ontology concepts, normalize
the matches into reviewable candidates, and apply the accepted ones to
produce an extended ontology.
"""

from ontoharvest.ontology import Ontology

__version__ = "0.1.0"

__all__ = ["Ontology", "__version__"]

"""keyscore: evaluation and analysis toolkit for keyphrase-generation outputs.

Computes exact and soft set-to-set F-scores over predicted vs gold keyphrase
sets, keyphrase-level model confidence and calibration from token
probability traces, and positional-robustness statistics over source
documents.
"""

from .calibration import (CalibrationBin, CalibrationReport, calibrate,
                          calibrate_samples, correctness, merge_reports,
                          reliability_data)
from .confidence import (KeyphraseConfidence, KppHistogram, PositionStats,
                         confidence, kpp, kpp_histogram, position_stats,
                         record_confidences)
from .corpus import (DEFAULT_DELIMITERS, Corpus, Document, HumanScoreRecord,
                     Keyphrase, KeyphraseSpan, PredictionRecord, TokenTrace,
                     build_record, build_trace, load_corpus, load_documents,
                     load_human_scores, load_predictions, save_corpus,
                     segment_spans)
from .embeddings import (CacheEmbeddingProvider, EmbeddingProvider,
                         HttpEmbeddingProvider, resolve_provider)
from .errors import (KeyscoreError, MissingEmbeddingError,
                     UndefinedResultError, ValidationError)
from .matching import (EXACT, KMR, ScoreFunction, ScoreKind, TokenEmbeddingSet,
                       apply_score, edit_distance, embedding_greedy_score,
                       exact_score, kmr, score_matrix)
from .positional import (PositionalReport, SectionAssignment, assign_sections,
                         first_occurrence, positional_report, section_of)
from .report import (CorpusReport, CorrelationResult, MetricSpec, aggregate,
                     correlate, emit, evaluate_corpus, evaluate_document,
                     make_metric_spec, pearson)
from .softscore import (AT_M, MetricConfig, MetricResult, Selection,
                        classic_f1, select_predictions, soft_f,
                        split_by_presence)
from .textnorm import (NormalizedPhrase, PresenceLabel, classify_presence,
                       dedup, dedup_indices, normalize, stem, tokenize,
                       tokenize_with_offsets)

__version__ = "0.1.0"

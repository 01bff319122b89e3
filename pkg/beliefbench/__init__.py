__version__ = "0.1.0"
__author__ = "Norman Juchler"

from ._errors import (BeliefBenchError,
                      InputError,
                      ParseError,
                      AcquisitionError,
                      GenerationError)
from ._gitlog import (FileChange,
                      CommitRecord,
                      parse_log,
                      extract_history,
                      read_extract,
                      write_extract)
from ._labeler import (FileCategory,
                       KeywordSet,
                       CategoryRules,
                       classify_commit,
                       categorize_file,
                       bugfix_fraction)
from ._metrics import (Belief,
                       FileHistory,
                       BeliefSample,
                       build_histories,
                       assemble_samples,
                       metrics_frame)
from ._stats import (Strength,
                     CorrelationResult,
                     DistributionSummary,
                     pearson,
                     correlate,
                     summarize,
                     summarize_all)
from ._config import RunConfig, load_config
from ._corpus import (ProjectEntry,
                      load_manifest,
                      acquire,
                      extract_project,
                      verify_corpus)
from ._report import (emit_tables,
                      emit_boxplots,
                      load_summary,
                      discrepancy_table)
from ._synth import SynthSpec, generate, oracle_metrics
from ._pipeline import cmd_extract, cmd_analyze, cmd_report

"""Item networks from visit logs: minimum-BIC forests, BIC hill-climbing DAGs,
centrality and first-visit order checks."""
from .dag import (CycleError, Dag, HillClimbResult, SearchConfig, hill_climb, is_acyclic,
                  parents, score_dag, statistical_time)
from .forest import Forest, connected_components, forest_bic, learn_min_bic_forest
from .ingest import (IndicatorDataset, IngestError, TransactionLog, TransactionRecord,
                     VisitCountTable, build_indicator_dataset, deduplicate, parse_transactions,
                     select_main_items, visit_counts, write_transactions)
from .metrics import UndirectedGraph, betweenness, closeness, degree, metrics_report
from .stats import (ContingencyTable, ScoreConfig, bic_edge_weight, dag_family_score,
                    graph_space_size, mutual_information, pair_counts)
from .temporal import (AgreementReport, Direction, PrecedenceEntry, conjecture_check,
                       physical_order, precedence_counts)

__version__ = "0.1.0"

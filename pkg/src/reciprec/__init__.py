"""Reciprocal learner-to-learner recommendation and its evaluation."""

from .distance import SimilarityMatrix, attribute_distances, build_similarity_matrix, distance_score
from .evaluation import EvalReport, RecommendationSet, baseline_recommend, evaluate
from .profiles import LearnerProfile, LocationTable, ParseError, Preference, parse_preferences, parse_profiles
from .ranker import RecommendationList, harmonic_mean, priority_rerank, recommend_all, reciprocal_scores, top_k
from .taxonomy import Taxonomy, TaxonomyError, load_taxonomy

__version__ = "0.1.0"

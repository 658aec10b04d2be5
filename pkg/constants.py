# constants.py
# This file centralizes all configuration constants for the workbench.

class ArsConfig:
    # --- Exploration bounds ---
    NODE_CAP = 10_000
    DEPTH_BOUND = 12

    # --- Normalization ---
    FUEL = 1000
    STRATEGIES = ["normal-order", "applicative-order"]


class LambdaConfig:
    # --- Exhaustive corpora ---
    DEBRUIJN_EXHAUSTIVE_SIZE = 8
    DEBRUIJN_RANDOM_SIZE = 12
    DEBRUIJN_FREE_BOUND = 4
    TAKAHASHI_SIZE = 6
    TAKAHASHI_FREE_BOUND = 3

    # Shift amounts / cutoffs / indices tried by the algebraic properties
    PARAMETER_RANGE = 3


class SkiConfig:
    EXHAUSTIVE_SIZE = 7


class RewriteConfig:
    # --- String rewriting ---
    ALPHABET = "ab"
    IDEMPOTENCY_RULES = [("aa", "a"), ("bb", "b")]
    STRING_CORPUS_LENGTH = 10
    HINDLEY_ROSEN_LENGTH = 8
    CRITICAL_PAIR_DEPTH = 4

    # --- Arithmetic ---
    EXPR_CORPUS_SIZE = 9


class TypingConfig:
    BASE_TYPES = 2
    TYPE_DEPTH = 2


class TestkitConfig:
    DEFAULT_SEED = 1
    DEFAULT_CASES = 10_000
    DEFAULT_MAX_SIZE = 8
    BACKTRACK_BUDGET = 200  # attempts per target type before it is abandoned
    TARGET_DRAWS = 50  # random target types tried before GiveUp
    CORPUS_DRAW_FACTOR = 4  # typed corpora stop after cases * factor draws
    SHRINK_STEPS = 200
    SUBJECT_REDUCTION_DEPTH = 5
    NEUTRALITY_SIZE = 5
    NEUTRALITY_ARGUMENT_SIZE = 3
    RANDOM_REWRITE_CASES = 200  # random strings and expressions beyond the exhaustive corpora
    RANDOM_STRING_LENGTH = 16
    RANDOM_EXPR_SIZE = 15
    SUITES = [
        "debruijn", "takahashi", "diamond", "newman",
        "hindley-rosen", "subject-reduction", "sn", "progress", "neutrality",
    ]


class CliConfig:
    # --- Exit codes ---
    EXIT_OK = 0
    EXIT_INPUT_ERROR = 1
    EXIT_BOUND_EXHAUSTED = 2
    EXIT_USAGE = 64

    # --- Numerals (inclusive ranges) ---
    MAX_DEPTH = 64
    MAX_FUEL = 1_000_000
    MAX_CAP = 1_000_000
    MAX_SEED = 2**64 - 1

    SYSTEMS = ["lambda", "ski", "expr", "srs", "stlc", "stlcext"]
    FORMATS = ["text", "dot", "json-lines"]

    # --- Environment ---
    SEED_ENV = "REWRITEKIT_SEED"
    LOG_LEVEL_ENV = "REWRITEKIT_LOG_LEVEL"
    LOG_FILE_ENV = "REWRITEKIT_LOG_FILE"
    CONFIG_FILE = "rewritekit.json"

from ghabuse.textkit.bm25 import Corpus, UnknownDocumentError, bm25_score, relevance
from ghabuse.textkit.extract import extract_commands, extract_links
from ghabuse.textkit.mlp import (
    ClassifierInputError,
    SpamClassifier,
    classifier_predict,
    classifier_train,
)
from ghabuse.textkit.similarity import levenshtein, name_similarity, readme_similarity
from ghabuse.textkit.spam import SpamModel, default_spam_model, train_spam_model
from ghabuse.textkit.tfidf import TfIdfModel, tfidf_fit, tfidf_transform
from ghabuse.textkit.tokenize import tokenize
from ghabuse.textkit.background import background_corpus, background_readmes

__all__ = [
    "ClassifierInputError",
    "Corpus",
    "SpamClassifier",
    "SpamModel",
    "TfIdfModel",
    "UnknownDocumentError",
    "background_corpus",
    "background_readmes",
    "bm25_score",
    "classifier_predict",
    "classifier_train",
    "default_spam_model",
    "extract_commands",
    "extract_links",
    "levenshtein",
    "name_similarity",
    "readme_similarity",
    "relevance",
    "tfidf_fit",
    "tfidf_transform",
    "tokenize",
    "train_spam_model",
]

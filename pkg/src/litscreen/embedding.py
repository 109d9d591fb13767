"""Word and document embeddings: skip-gram and PV-DBOW over hierarchical softmax.

Both trainers share one SGD core, :func:`hs_step`, which walks a token's
root-to-leaf path through a Huffman tree built from vocabulary counts.
Training is sequential and bit-reproducible for a fixed seed.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Vocabulary, build_vocabulary

__all__ = [
    "EmbeddingConfig",
    "HuffmanCoding",
    "WordModel",
    "DocModel",
    "OutOfVocabularyError",
    "build_huffman",
    "hs_step",
    "train_word2vec",
    "train_doc2vec",
    "vector_of",
    "cosine_similarity",
]


class OutOfVocabularyError(LookupError):
    """Token has no vector in the model."""


@dataclass(frozen=True)
class EmbeddingConfig:
    """Hyperparameters shared by the word and document trainers.

    The learning rate decays linearly from ``alpha0`` to ``alpha_min`` over
    the total number of token positions processed across all epochs.
    """

    dim: int = 200
    window: int = 5
    epochs: int = 5
    alpha0: float = 0.025
    alpha_min: float = 0.0001
    min_count: int = 1
    seed: int = 0
    deterministic: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not (self.alpha0 > self.alpha_min > 0):
            raise ValueError(
                f"need alpha0 > alpha_min > 0, got {self.alpha0}, {self.alpha_min}"
            )


@dataclass
class HuffmanCoding:
    """Per-token prefix-free codes over the frequency-built Huffman tree.

    ``signs[i]`` holds the code of token i as a +/-1 float sequence and
    ``paths[i]`` the internal-node indices from root to leaf; both have the
    same length. ``n_nodes`` is V-1.
    """

    signs: list[np.ndarray]
    paths: list[np.ndarray]
    n_nodes: int

    def code_lengths(self) -> list[int]:
        return [len(p) for p in self.paths]


@dataclass
class WordModel:
    """Trained token vectors plus the internal-node matrix behind them."""

    vocab: Vocabulary
    vectors: np.ndarray  # (V, dim) token vectors
    node_vectors: np.ndarray  # (V-1, dim)
    config: EmbeddingConfig
    seed: int
    epoch_losses: list[float] = field(default_factory=list)
    pairs_trained: int = 0


@dataclass
class DocModel:
    """One trained vector per document, keyed by document id."""

    ids: list[str]
    vectors: np.ndarray  # (N, dim)
    config: EmbeddingConfig
    seed: int
    epoch_losses: list[float] = field(default_factory=list)

    def vector_for(self, doc_id: str) -> np.ndarray:
        try:
            return self.vectors[self.ids.index(doc_id)]
        except ValueError:
            raise OutOfVocabularyError(f"no vector for document {doc_id!r}") from None


def build_huffman(vocab: Vocabulary) -> HuffmanCoding:
    """Build the binary Huffman tree over token frequencies.

    Merge order on count ties: lower node index first; leaves carry their
    vocabulary index, internal nodes are numbered V, V+1, ... in creation
    order. Fully deterministic.
    """
    if vocab.counts is None:
        raise ValueError("vocabulary has no counts; cannot build a Huffman tree")
    V = len(vocab)
    if V < 2:
        raise ValueError(f"Huffman tree needs at least 2 tokens, got {V}")

    counts = [0] * V
    for token, i in vocab.index.items():
        counts[i] = vocab.counts[token]

    # heap entries: (count, node_id); children[k] = (first_pop, second_pop)
    heap = [(counts[i], i) for i in range(V)]
    heapq.heapify(heap)
    children: list[tuple[int, int]] = []
    next_id = V
    while len(heap) > 1:
        c1, n1 = heapq.heappop(heap)
        c2, n2 = heapq.heappop(heap)
        children.append((n1, n2))
        heapq.heappush(heap, (c1 + c2, next_id))
        next_id += 1

    # walk each leaf's parent chain; root is the last internal node
    parent = [0] * (2 * V - 1)
    branch = [0.0] * (2 * V - 1)  # +1 for first-popped child, -1 for second
    for k, (n1, n2) in enumerate(children):
        parent[n1] = V + k
        parent[n2] = V + k
        branch[n1] = 1.0
        branch[n2] = -1.0

    root = 2 * V - 2
    signs = []
    paths = []
    for leaf in range(V):
        rev_signs = []
        rev_path = []
        node = leaf
        while node != root:
            rev_signs.append(branch[node])
            rev_path.append(parent[node] - V)
            node = parent[node]
        signs.append(np.array(rev_signs[::-1], dtype=np.float64))
        paths.append(np.array(rev_path[::-1], dtype=np.int64))
    return HuffmanCoding(signs=signs, paths=paths, n_nodes=V - 1)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


def hs_step(
    center: np.ndarray,
    node_rows: np.ndarray,
    signs: np.ndarray,
    alpha: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """One SGD step of the hierarchical-softmax objective for one prediction.

    loss = -sum_i log sigmoid(signs[i] * <center, node_rows[i]>)

    Both gradients are evaluated at the incoming values; returns
    (pre-update loss, updated center, updated node rows).
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    z = node_rows @ center
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite input to hs_step")
    sz = signs * z
    loss = float(np.sum(np.logaddexp(0.0, -sz)))
    g = signs * (1.0 - _sigmoid(sz))  # (L,)
    new_center = center + alpha * (g @ node_rows)
    new_rows = node_rows + alpha * np.outer(g, center)
    return loss, new_center, new_rows


def _init_matrix(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    return (rng.random((rows, dim)) - 0.5) / dim


def train_word2vec(token_lists, config: EmbeddingConfig, vocab: Vocabulary | None = None) -> WordModel:
    """Train skip-gram token vectors with hierarchical softmax.

    For each in-vocabulary position a window radius is drawn uniformly from
    1..window and every context token inside it is predicted from the center
    token's vector. Token vectors start uniform in [-0.5/dim, 0.5/dim]
    (seeded); node vectors start at zero.
    """
    token_lists = [list(t) for t in token_lists]
    if not token_lists:
        raise ValueError("empty corpus")
    if vocab is None:
        vocab = build_vocabulary(token_lists, min_count=config.min_count)
    coding = build_huffman(vocab)

    rng = np.random.default_rng(config.seed)
    vectors = _init_matrix(rng, len(vocab), config.dim)
    nodes = np.zeros((coding.n_nodes, config.dim))

    indexed_docs = [
        [vocab.index[t] for t in tokens if t in vocab.index] for tokens in token_lists
    ]
    tokens_per_epoch = sum(len(d) for d in indexed_docs)
    if tokens_per_epoch == 0:
        raise ValueError("no in-vocabulary tokens to train on")
    total = config.epochs * tokens_per_epoch

    alpha_span = config.alpha0 - config.alpha_min
    processed = 0
    pairs = 0
    epoch_losses = []
    for _ in range(config.epochs):
        epoch_loss = 0.0
        epoch_pairs = 0
        for doc in indexed_docs:
            n = len(doc)
            for pos in range(n):
                alpha = max(
                    config.alpha_min,
                    config.alpha0 - alpha_span * (processed / total),
                )
                processed += 1
                radius = int(rng.integers(1, config.window + 1))
                center_idx = doc[pos]
                lo = max(0, pos - radius)
                hi = min(n, pos + radius + 1)
                for ctx_pos in range(lo, hi):
                    if ctx_pos == pos:
                        continue
                    target = doc[ctx_pos]
                    path = coding.paths[target]
                    loss, new_center, new_rows = hs_step(
                        vectors[center_idx], nodes[path], coding.signs[target], alpha
                    )
                    vectors[center_idx] = new_center
                    nodes[path] = new_rows
                    epoch_loss += loss
                    epoch_pairs += 1
        pairs += epoch_pairs
        epoch_losses.append(epoch_loss / max(1, epoch_pairs))

    return WordModel(
        vocab=vocab,
        vectors=vectors,
        node_vectors=nodes,
        config=config,
        seed=config.seed,
        epoch_losses=epoch_losses,
        pairs_trained=pairs,
    )


def train_doc2vec(token_lists, config: EmbeddingConfig, ids=None) -> DocModel:
    """Train PV-DBOW document vectors.

    Each document's vector plays the center role and predicts every
    in-vocabulary token of that document through the shared Huffman tree;
    schedule and initialization match :func:`train_word2vec`.
    """
    token_lists = [list(t) for t in token_lists]
    if not token_lists:
        raise ValueError("empty corpus")
    if ids is None:
        ids = [str(i) for i in range(len(token_lists))]
    ids = [str(i) for i in ids]
    if len(ids) != len(token_lists):
        raise ValueError(f"{len(ids)} ids for {len(token_lists)} documents")

    vocab = build_vocabulary(token_lists, min_count=config.min_count)
    coding = build_huffman(vocab)

    rng = np.random.default_rng(config.seed)
    doc_vectors = _init_matrix(rng, len(token_lists), config.dim)
    nodes = np.zeros((coding.n_nodes, config.dim))

    indexed_docs = [
        [vocab.index[t] for t in tokens if t in vocab.index] for tokens in token_lists
    ]
    tokens_per_epoch = sum(len(d) for d in indexed_docs)
    if tokens_per_epoch == 0:
        raise ValueError("no in-vocabulary tokens to train on")
    total = config.epochs * tokens_per_epoch

    alpha_span = config.alpha0 - config.alpha_min
    processed = 0
    epoch_losses = []
    for _ in range(config.epochs):
        epoch_loss = 0.0
        epoch_steps = 0
        for doc_idx, doc in enumerate(indexed_docs):
            for target in doc:
                alpha = max(
                    config.alpha_min,
                    config.alpha0 - alpha_span * (processed / total),
                )
                processed += 1
                path = coding.paths[target]
                loss, new_center, new_rows = hs_step(
                    doc_vectors[doc_idx], nodes[path], coding.signs[target], alpha
                )
                doc_vectors[doc_idx] = new_center
                nodes[path] = new_rows
                epoch_loss += loss
                epoch_steps += 1
        epoch_losses.append(epoch_loss / max(1, epoch_steps))

    return DocModel(
        ids=ids,
        vectors=doc_vectors,
        config=config,
        seed=config.seed,
        epoch_losses=epoch_losses,
    )


def vector_of(model: WordModel, token: str) -> np.ndarray:
    """The token's trained vector; raises OutOfVocabularyError if absent."""
    idx = model.vocab.index.get(token)
    if idx is None:
        raise OutOfVocabularyError(f"token {token!r} is not in the vocabulary")
    return model.vectors[idx]


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """<a, b> / (|a| |b|); raises ValueError on zero-norm input."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for zero-norm vector")
    return float(a @ b) / (na * nb)

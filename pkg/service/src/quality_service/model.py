"""Self-contained transformer regression model for source-text quality.

The encoder is a small transformer trained from scratch over hashed word
ids, so training and inference need no downloaded weights; its size knobs
(dimension, layers, heads, vocabulary) live in ModelConfig.  The regression
head emits one raw score per text, trained against labels scaled to
[0.1, 0.9].
"""
from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import torch
from torch import nn


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int = 4096
    dim: int = 48
    layers: int = 1
    heads: int = 4
    max_tokens: int = 64
    dropout: float = 0.2
    truncate_chars: int = 2000
    seed: int = 0


def tokenize(text: str, config: ModelConfig) -> list[int]:
    """Stable hashed word ids (1..vocab_size); 0 is padding."""
    tokens = text[:config.truncate_chars].casefold().split()[:config.max_tokens]
    return [1 + zlib.crc32(t.encode("utf-8")) % config.vocab_size for t in tokens]


class QualityRegressor(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.embedding = nn.Embedding(config.vocab_size + 1, config.dim, padding_idx=0)
        self.positions = nn.Embedding(config.max_tokens, config.dim)
        layer = nn.TransformerEncoderLayer(
            d_model=config.dim, nhead=config.heads, dim_feedforward=config.dim * 2,
            dropout=config.dropout, batch_first=True)
        # the nested-tensor eval fastpath is slower than the padded path on
        # small CPU batches; keep the ordinary path
        self.encoder = nn.TransformerEncoder(layer, num_layers=config.layers,
                                             enable_nested_tensor=False)
        # attention pooling: a learned query picks out the informative
        # tokens instead of diluting them in a mean
        self.pool_query = nn.Parameter(torch.randn(config.dim) / config.dim ** 0.5)
        self.head = nn.Sequential(
            nn.Linear(config.dim, config.dim),
            nn.GELU(),
            nn.Linear(config.dim, 1),
        )

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        mask = ids.eq(0)
        # rows of pure padding (empty text) keep finite scores so the
        # softmax stays defined
        all_pad = mask.all(dim=1, keepdim=True)
        positions = torch.arange(ids.shape[1], device=ids.device).unsqueeze(0)
        x = self.embedding(ids) + self.positions(positions)
        x = self.encoder(x, src_key_padding_mask=mask & ~all_pad)
        scores = (x @ self.pool_query) / self.config.dim ** 0.5
        scores = scores.masked_fill(mask & ~all_pad, float("-inf"))
        weights = torch.softmax(scores, dim=1).unsqueeze(-1)
        pooled = (x * weights).sum(dim=1)
        return self.head(pooled).squeeze(-1)


def batch_ids(texts: Sequence[str], config: ModelConfig) -> torch.Tensor:
    rows = [tokenize(t, config) or [0] for t in texts]
    width = max(len(r) for r in rows)
    return torch.tensor([r + [0] * (width - len(r)) for r in rows], dtype=torch.long)


class ScoringBundle:
    """A trained model plus its config, ready for deterministic inference."""

    def __init__(self, model: QualityRegressor, config: ModelConfig, version: str):
        self.model = model
        self.config = config
        self.version = version
        self.model.eval()

    @torch.no_grad()
    def score(self, texts: Sequence[str], batch_size: int = 64) -> list[float]:
        out: list[float] = []
        for lo in range(0, len(texts), batch_size):
            ids = batch_ids(texts[lo:lo + batch_size], self.config)
            out.extend(float(v) for v in self.model(ids))
        return out

    def save(self, out_dir: str | Path) -> None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        torch.save(self.model.state_dict(), out_dir / "model.pt")
        (out_dir / "config.json").write_text(json.dumps(
            {"model": asdict(self.config), "version": self.version}, indent=2),
            encoding="utf-8")

    @classmethod
    def load(cls, artifacts_dir: str | Path) -> "ScoringBundle":
        artifacts_dir = Path(artifacts_dir)
        meta = json.loads((artifacts_dir / "config.json").read_text(encoding="utf-8"))
        config = ModelConfig(**meta["model"])
        model = QualityRegressor(config)
        state = torch.load(artifacts_dir / "model.pt", map_location="cpu",
                           weights_only=True)
        model.load_state_dict(state)
        return cls(model, config, meta["version"])

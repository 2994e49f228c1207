"""Desk-scale attention encoder-decoder for postorder equation templates."""

from .data import Example, Vocab, build_vocabs, load_examples
from .decode import beam_decode, exact_match_rate, predict_to_file
from .model import Seq2Seq, ToyModelConfig
from .train import load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"

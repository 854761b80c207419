# qasrl/python/qasrl/__init__.py

# Copyright 2026  QA-SRL Toolkit Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the QA-SRL toolkit."""

import json

from . import _qasrl
from ._qasrl import (
    ValidationError,
    agreement_kappa,
    expansion_payment,
    generation_payment,
    slot_names,
    span_detection_prf,
    validation_payment,
    viterbi_decode,
)

__all__ = [
    "Grammar",
    "ValidationError",
    "agreement_kappa",
    "corpus_stats",
    "expansion_payment",
    "generation_payment",
    "inflect",
    "load_corpus",
    "run_cli",
    "slot_names",
    "span_detection_prf",
    "synthetic_corpus",
    "validation_payment",
    "viterbi_decode",
]


class Grammar:
    """The question grammar. Slots are dicts in the corpus JSON format."""

    def __init__(self, prepositions=None):
        self._g = _qasrl.Grammar() if prepositions is None else _qasrl.Grammar(list(prepositions))

    @property
    def prepositions(self):
        return self._g.prepositions()

    def vocabulary_size(self, slot):
        return self._g.vocabulary_size(slot)

    def value_name(self, slot, code):
        return self._g.value_name(slot, code)

    def autocomplete(self, prefix):
        return self._g.autocomplete(list(prefix))

    def accepts(self, slots):
        return self._g.accepts_json(json.dumps(slots))

    def render(self, slots, verb):
        return self._g.render_json(json.dumps(slots), verb)

    def parse(self, question, verb):
        return json.loads(self._g.parse_json(question, verb))


def inflect(verb):
    return json.loads(_qasrl.inflect_json(verb))


def load_corpus(path):
    return json.loads(_qasrl.load_corpus_json(str(path)))


def corpus_stats(path):
    return json.loads(_qasrl.corpus_stats_json(str(path)))


def synthetic_corpus(sentences, seed=0):
    return json.loads(_qasrl.synthetic_corpus_json(sentences, seed))


def run_cli(args):
    """Run the command-line interface in-process. Returns (code, stdout, stderr)."""
    return _qasrl.run_cli([str(a) for a in args])

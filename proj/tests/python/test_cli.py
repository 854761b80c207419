# qasrl/tests/python/test_cli.py

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

import json
import subprocess
import sys
import time
import urllib.request

import jsonschema

import qasrl


def validate(schemas, name, doc):
    schema = json.loads((schemas / f"{name}.schema.json").read_text())
    jsonschema.validate(doc, schema)


def run_json(*args):
    code, out, err = qasrl.run_cli(["--json", *args])
    return code, json.loads(out) if out.strip() else None, err


def test_stats_matches_schema(schemas, fixture_corpus):
    code, doc, _ = run_json("stats", "--corpus", fixture_corpus)
    assert code == 0
    validate(schemas, "stats", doc)


def test_errors_match_schema(schemas, tmp_path):
    code, doc, _ = run_json("stats", "--corpus", tmp_path / "missing.jsonl")
    assert code == 2
    validate(schemas, "error", doc)


def test_synthetic_and_jackknife(schemas, tmp_path):
    corpus = tmp_path / "syn.jsonl"
    code, doc, _ = run_json("--seed", "4", "synthetic", "-n", "12", "-o", corpus)
    assert code == 0
    validate(schemas, "synthetic", doc)
    assert len(qasrl.load_corpus(corpus)) == 12
    (tmp_path / "folds").mkdir()
    code, doc, _ = run_json("jackknife", "--corpus", corpus, "-k", "3", "--out-dir", tmp_path / "folds")
    assert code == 0
    validate(schemas, "jackknife", doc)


def test_evaluate_empty_predictions(schemas, fixture_corpus, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code, doc, _ = run_json("evaluate", "--exact", "--gold", fixture_corpus, "--predictions", empty)
    assert code == 0
    validate(schemas, "evaluate", doc)
    assert doc["prf"]["recall"] == 0.0


def test_usage_error_exit_code():
    code, _, err = qasrl.run_cli(["stats", "--no-such-flag"])
    assert code == 2
    assert "Usage" in err


def test_serve_reports_stats(schemas, fixture_corpus):
    proc = subprocess.Popen(
        [sys.executable, "-m", "qasrl", "--json", "serve", "--port", "0", "--corpus", str(fixture_corpus)],
        stdout=subprocess.PIPE,
        text=True,
    )
    try:
        banner = json.loads(proc.stdout.readline())
        validate(schemas, "serve", banner)
        url = f"http://{banner['host']}:{banner['port']}/api/stats"
        for _ in range(50):
            try:
                with urllib.request.urlopen(url, timeout=5) as res:
                    stats = json.loads(res.read())
                break
            except OSError:
                time.sleep(0.1)
        assert stats["tasks"]["generation"]["open"] == banner["tasks"]
        assert stats["payments"]["totalCents"] == 0
    finally:
        proc.terminate()
        proc.wait(timeout=10)

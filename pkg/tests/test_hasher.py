import hashlib
import json
import os
import shutil
import tempfile
import unittest

import numpy as np

from confinium.hasher import Hasher
from confinium.model import Kind, SystemSpec


class TestHasher(unittest.TestCase):
    def test_key_order_irrelevant(self):
        self.assertEqual(Hasher.digest({"a": 1, "b": 2}), Hasher.digest({"b": 2, "a": 1}))
        self.assertNotEqual(Hasher.digest({"a": 1}), Hasher.digest({"a": 2}))

    def test_non_finite_floats(self):
        text = Hasher.canonical_json({"x": float("inf"), "y": -float("inf"), "z": float("nan")})
        self.assertEqual(json.loads(text), {"x": "inf", "y": "-inf", "z": "nan"})

    def test_numpy_values(self):
        data = {"a": np.float64(0.5), "b": np.int64(3), "c": np.array([1.0, np.inf]), "d": np.bool_(True)}
        self.assertEqual(json.loads(Hasher.canonical_json(data)), {"a": 0.5, "b": 3, "c": [1.0, "inf"], "d": True})

    def test_dataclass_and_enum(self):
        sys = SystemSpec.make(Kind.CHA, r_c=1.0)
        self.assertEqual(json.loads(Hasher.canonical_json({"sys": sys, "kind": Kind.CHA})),
                         {"sys": {"kind": "cha", "r_c": 1.0, "ell": 0}, "kind": "cha"})

    def test_trailing_newline(self):
        self.assertTrue(Hasher.canonical_json([]).endswith("\n"))

    def test_digest_is_compact_sha256(self):
        expected = hashlib.sha256(b'{"a":[1,2.5]}').hexdigest()
        self.assertEqual(Hasher.digest({"a": [1, 2.5]}), expected)

    def test_hash_file(self):
        test_dir = tempfile.mkdtemp()
        try:
            path = os.path.join(test_dir, "data.bin")
            with open(path, "wb") as f:
                f.write(b"confined")
            self.assertEqual(Hasher.hash_file(path), hashlib.sha256(b"confined").hexdigest())
            self.assertEqual(Hasher.hash_file(os.path.join(test_dir, "missing")), "N/A")
        finally:
            shutil.rmtree(test_dir)


if __name__ == '__main__':
    unittest.main()

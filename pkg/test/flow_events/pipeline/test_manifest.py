"""
Tests the run manifest
"""
import json
import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

from flow_events.common.data_types.exceptions import ManifestException
from flow_events.pipeline.manifest import MANIFEST_NAME, Manifest, file_digest
from flow_events.version import OUTPUT_SCHEMA_VERSION


class ManifestTestCases(unittest.TestCase):
    def setUp(self):
        self.directory = TemporaryDirectory()
        self.root = Path(self.directory.name)
        (self.root / "bars").mkdir()
        (self.root / "bars" / "S1.csv").write_text("a,b\n1,2\n")
        (self.root / "events.csv").write_text("stock_id\n")
        self.manifest = Manifest(self.root)
        self.manifest.register("classify", self.root / "bars" / "S1.csv")
        self.manifest.register("detect", self.root / "events.csv")
        self.manifest.set_counts("detect", {"events": 0})

    def tearDown(self):
        self.directory.cleanup()

    def test_save_and_load(self):
        path = self.manifest.save()
        self.assertEqual(path.name, MANIFEST_NAME)
        data = json.loads(path.read_text())
        self.assertEqual(data["schema_version"], OUTPUT_SCHEMA_VERSION)
        self.assertEqual(sorted(data["files"]), ["bars/S1.csv", "events.csv"])
        self.assertEqual(data["files"]["events.csv"]["sha256"], file_digest(self.root / "events.csv"))
        loaded = Manifest.load(self.root)
        self.assertEqual(loaded.to_dict(), self.manifest.to_dict())
        self.assertEqual(Manifest.load(path).files_of("classify"), ["bars/S1.csv"])

    def test_verify_detects_changes(self):
        self.manifest.verify()
        (self.root / "events.csv").write_text("stock_id,day\n")
        with self.assertRaises(ManifestException):
            self.manifest.verify()
        (self.root / "events.csv").unlink()
        with self.assertRaises(ManifestException):
            self.manifest.verify()

    def test_forget_stage(self):
        self.manifest.forget_stage("classify")
        self.assertEqual(list(self.manifest.files), ["events.csv"])

    def test_missing_manifest(self):
        with self.assertRaises(ManifestException):
            Manifest.load(self.root)
        self.assertEqual(Manifest.load(self.root, required=False).files, {})

    def test_malformed_manifests(self):
        path = self.root / MANIFEST_NAME
        for content in (
            "{",
            json.dumps({"files": {}, "counts": {}}),
            json.dumps({"files": {}, "counts": {}, "schema_version": OUTPUT_SCHEMA_VERSION + 1}),
            json.dumps({"files": {"x": {"stage": "detect"}}, "counts": {}, "schema_version": OUTPUT_SCHEMA_VERSION}),
        ):
            path.write_text(content)
            with self.assertRaises(ManifestException):
                Manifest.load(self.root)

"""
manifest.py:

Index of every file a run wrote. Entries are keyed by path relative to the output directory and carry the producing
stage and a sha256 of the content. Nothing time dependent is stored, so two runs on the same inputs give identical
manifests.
"""
import hashlib
import json
import logging
from pathlib import Path

from flow_events.common.data_types.exceptions import ManifestException
from flow_events.version import MINIMUM_SUPPORTED_SCHEMA_VERSION, OUTPUT_SCHEMA_VERSION

LOGGER = logging.getLogger("pipeline")

MANIFEST_NAME = "manifest.json"


def file_digest(path):
    digest = hashlib.sha256()
    with open(path, "rb") as file_handle:
        for chunk in iter(lambda: file_handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class Manifest:
    def __init__(self, root):
        self.root = Path(root)
        self.files = {}
        self.counts = {}
        # delimiter of the stage tables
        self.delimiter = ","

    @property
    def path(self):
        return self.root / MANIFEST_NAME

    def register(self, stage, path):
        path = Path(path)
        relative = path.relative_to(self.root).as_posix()
        self.files[relative] = {"stage": stage, "sha256": file_digest(path)}
        return relative

    def forget_stage(self, stage):
        """Drop the entries of a stage before it is rerun"""
        self.files = {key: entry for key, entry in self.files.items() if entry["stage"] != stage}

    def set_counts(self, stage, counts):
        self.counts[stage] = dict(counts)

    def files_of(self, stage):
        return sorted(key for key, entry in self.files.items() if entry["stage"] == stage)

    def to_dict(self):
        return {
            "counts": self.counts,
            "delimiter": self.delimiter,
            "files": self.files,
            "schema_version": OUTPUT_SCHEMA_VERSION,
        }

    def save(self):
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w") as file_handle:
            json.dump(self.to_dict(), file_handle, indent=2, sort_keys=True)
            file_handle.write("\n")
        return self.path

    def verify(self):
        """
        Check every entry against the file on disk

        Raises:
            ManifestException naming the first missing or modified file
        """
        for relative, entry in sorted(self.files.items()):
            path = self.root / relative
            if not path.is_file():
                raise ManifestException(f"{relative} is listed but missing")
            if file_digest(path) != entry["sha256"]:
                raise ManifestException(f"{relative} does not match its recorded hash")
        return self

    @classmethod
    def load(cls, path, required=True):
        """
        Read a manifest

        Args:
            path: the manifest file or the output directory holding it
            required: when False, a missing manifest yields an empty one
        Raises:
            ManifestException for a missing (when required) or malformed manifest
        """
        path = Path(path)
        if path.is_dir() or not path.suffix:
            path = path / MANIFEST_NAME
        manifest = cls(path.parent)
        if not path.is_file():
            if required:
                raise ManifestException(f"{path} not found")
            return manifest
        try:
            with open(path, "r") as file_handle:
                data = json.load(file_handle)
            files, counts = data["files"], data["counts"]
            version = data["schema_version"]
            delimiter = data.get("delimiter", ",")
            if not MINIMUM_SUPPORTED_SCHEMA_VERSION <= version <= OUTPUT_SCHEMA_VERSION:
                raise ManifestException(f"{path} has unsupported schema version {version}")
            for relative, entry in files.items():
                if set(entry) != {"stage", "sha256"}:
                    raise ManifestException(f"entry {relative} has keys {sorted(entry)}")
        except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
            raise ManifestException(f"{path} is malformed: {exc}")
        manifest.files = dict(files)
        manifest.counts = dict(counts)
        manifest.delimiter = delimiter
        return manifest

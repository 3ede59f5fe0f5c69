"""Verification records and their JSON form."""

from dataclasses import asdict, dataclass, field
import json

SCHEMA_VERSION = 1


@dataclass
class Record:
    check_id: str
    case: tuple
    computed: object
    expected: object
    provenance: str
    passed: object  # True, False, or None when the check does not apply
    elapsed_ms: int = 0
    note: str = ""

    def to_json(self):
        d = asdict(self)
        d["case"] = {"m": self.case[0], "q": self.case[1]}
        d["pass"] = d.pop("passed")
        return d

    @classmethod
    def from_json(cls, d):
        d = dict(d)
        d["case"] = (d["case"]["m"], d["case"]["q"])
        d["passed"] = d.pop("pass")
        return cls(**d)


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def add(self, record):
        self.records.append(record)
        return record

    def extend(self, other):
        self.records.extend(other.records)

    @property
    def ok(self):
        return all(r.passed is not False for r in self.records)

    def summary(self):
        return {
            "total": len(self.records),
            "passed": sum(r.passed is True for r in self.records),
            "failed": sum(r.passed is False for r in self.records),
            "skipped": sum(r.passed is None for r in self.records),
        }

    def sorted(self):
        return VerificationReport(
            sorted(self.records, key=lambda r: (tuple(r.case), r.check_id)), dict(self.config)
        )

    def to_json(self):
        return {
            "version": SCHEMA_VERSION,
            "config": self.config,
            "records": [r.to_json() for r in self.records],
            "summary": self.summary(),
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text):
        d = json.loads(text)
        if d.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report version {d.get('version')!r}")
        report = cls([Record.from_json(r) for r in d["records"]], d["config"])
        if report.summary() != d["summary"]:
            raise ValueError("report summary does not match its records")
        return report

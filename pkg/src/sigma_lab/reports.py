"""Report records shared by the audit operations and the suite runner.

Witnesses embed enough raw table data to re-run the failing instance
standalone.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def algebra_doc(a):
    doc = {"kind": a.kind, "name": a.name or "", "order": a.order}
    if a.kind == "monoid":
        doc["unit"] = a.unit
        doc["table"] = [list(r) for r in a.table]
    elif a.kind == "quandle":
        doc["table"] = [list(r) for r in a.table]
    else:
        doc["addTable"] = [list(r) for r in a.add_table]
        doc["mulTable"] = [list(r) for r in a.mul_table]
    return doc


def hom_doc(h, inline=False):
    doc = {
        "kind": "hom",
        "source": algebra_doc(h.source) if inline else (h.source.name or "?"),
        "target": algebra_doc(h.target) if inline else (h.target.name or "?"),
        "map": list(h.mapping),
    }
    return doc


def point_doc(p, inline=False):
    return {"kind": "point", "epi": hom_doc(p.f, inline),
            "section": hom_doc(p.s, inline)}


def relation_doc(rel):
    return {"base": rel.base.name or "?", "pairs": sorted(map(list, rel.pairs))}


@dataclass
class AuditEntry:
    instance: str
    verdict: bool
    witness: object = None

    def to_json(self):
        out = {"instance": self.instance, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class AuditReport:
    title: str
    entries: list = field(default_factory=list)

    def add(self, instance, verdict, witness=None):
        self.entries.append(AuditEntry(instance, bool(verdict), witness))

    @property
    def passed(self):
        return all(e.verdict for e in self.entries)

    def failures(self):
        return [e for e in self.entries if not e.verdict]

    def to_json(self):
        return {"title": self.title, "passed": self.passed,
                "entries": [e.to_json() for e in self.entries]}

    def __len__(self):
        return len(self.entries)

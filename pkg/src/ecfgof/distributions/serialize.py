"""FamilySpec JSON documents.

Every document carries a ``family`` tag plus the fields of the matching
parameter record; see ``schemas/family_spec.schema.json``.  Bivariate
alpha-stable laws may be written compactly as ``{"family": "as",
"circle": q, "index": a}`` (q equal atoms on the unit circle).
"""

import json

from .params import FAMILY_TYPES, AsParams, GhParams, SasParams, SlParams, SnParams, StParams, circle_atoms


def to_dict(params):
    fam = params.family
    if isinstance(params, SasParams):
        return {"family": fam, "e": params.e.tolist(), "f": params.f.tolist()}
    out = {"family": fam, "xi": params.xi.tolist()}
    if isinstance(params, AsParams):
        out["index"] = params.index
        out["atoms"] = [
            {"s": s.tolist(), "gamma": float(w)} for s, w in zip(params.atoms, params.weights)
        ]
        return out
    out["omega"] = params.omega.tolist()
    if isinstance(params, GhParams):
        out["g"] = params.g.tolist()
        out["h"] = params.h.tolist()
        return out
    out["alpha"] = params.alpha.tolist()
    if isinstance(params, StParams):
        out["nu"] = params.nu
    return out


def from_dict(doc):
    if not isinstance(doc, dict) or "family" not in doc:
        raise ValueError("family spec must be an object with a 'family' key")
    fam = str(doc["family"]).lower()
    if fam not in FAMILY_TYPES:
        raise ValueError(f"unknown family {fam!r}")
    try:
        if fam == "sas":
            return SasParams(doc["e"], doc["f"])
        if fam == "as":
            if "circle" in doc:
                return circle_atoms(int(doc["circle"]), doc["index"], doc.get("xi", (0.0, 0.0)))
            atoms = [a["s"] for a in doc["atoms"]]
            weights = [a["gamma"] for a in doc["atoms"]]
            return AsParams(doc["xi"], atoms, weights, doc["index"])
        if fam == "gh":
            return GhParams(doc["xi"], doc["omega"], doc["g"], doc["h"])
        if fam == "sl":
            return SlParams(doc["xi"], doc["omega"], doc["alpha"])
        if fam == "st":
            return StParams(doc["xi"], doc["omega"], doc["alpha"], doc["nu"])
        return SnParams(doc["xi"], doc["omega"], doc["alpha"])
    except KeyError as exc:
        raise ValueError(f"family spec for {fam!r} is missing field {exc.args[0]!r}") from None


def dumps(params, **kw):
    return json.dumps(to_dict(params), **kw)


def loads(text):
    return from_dict(json.loads(text))


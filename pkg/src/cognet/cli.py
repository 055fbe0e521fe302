"""Command-line pipeline: ``build`` writes networks to disk, then
``balance``, ``structure`` and ``profile`` analyse them.

Exit codes: 0 success, 1 analysis error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .emoprofile import (
    EMOTIONS,
    ProfileError,
    emotion_profile,
    profile_comparison,
    semantic_frame,
    wheel_export,
)
from .ingest import (
    NEGATIVE,
    POSITIVE,
    AnnotatedCorpus,
    IngestError,
    load_free_associations,
    load_lexicons,
    normalize_lemmas,
    read_conllu,
    read_stopwords,
)
from .metrics import (
    MetricError,
    closeness_ranking,
    degeneracy,
    detached_nodes,
    giant_component,
    giant_component_stats,
    girvan_newman_clusters,
    null_shrinkage,
    rank_drop_from_ranks,
    shrinkage,
    strength_distribution,
    summarize_shrinkage,
)
from .netbuild import (
    FA,
    build_co_network,
    build_fa_network,
    build_svo_network,
    extract_svo_triplets,
    pair_document_counts,
    read_edgelist,
    restrict_network,
    write_edgelist,
)
from .nullmodels import (
    DEGREE_REWIRE,
    SOFT_WEIGHTED_CM,
    NullEnsembleSpec,
    NullModelError,
    degree_rewire,
    fit_soft_weighted_cm,
    sample_soft_cm,
)
from .signedbalance import assign_signs, balance_comparison
from .stats import chi2_two_proportions

log = logging.getLogger("cognet")

SCHEMA_VERSION = 1
NETWORK_FILES = {"CO": "co.tsv", "SVO": "svo.tsv", "FA": "fa.tsv"}


class UsageError(Exception):
    pass


# -- helpers ------------------------------------------------------------------------

def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _check_file(path, flag):
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{flag}: no such file: {path}")
    return p


def _config(args, keys) -> dict:
    cfg = {}
    for k in keys:
        v = getattr(args, k, None)
        if isinstance(v, list):
            v = list(v)
        cfg[k] = v
    return cfg


def _provenance(args, keys, inputs: dict) -> dict:
    """Config block embedded in every report; excludes the output path so
    reruns into another directory stay byte-identical."""
    cfg = _config(args, keys)
    hashes = {name: _sha256(p) for name, p in sorted(inputs.items()) if p is not None}
    canon = json.dumps({"config": cfg, "inputs": hashes}, sort_keys=True)
    return {
        "tool": "cognet",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "input_sha256": hashes,
        "config_hash": hashlib.sha256(canon.encode()).hexdigest(),
        "seed": getattr(args, "seed", None),
        "n_samples": getattr(args, "samples", None),
    }


def _write_json(path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")


def _write_csv(path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else v for v in r])


def _cached(out: Path, name: str, key: dict, compute):
    """JSON cache for expensive null ensembles, keyed by content hash."""
    digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:16]
    path = out / "cache" / f"{name}-{digest}.json"
    if path.is_file():
        log.info("cache hit %s", path.name)
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    value = compute()
    _write_json(path, value)
    # reload so cached and fresh runs see identical (JSON round-tripped) values
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _lexicons(args):
    val = _check_file(args.valence, "--valence")
    emo = _check_file(args.emotions, "--emotions")
    stop = _check_file(args.stopwords, "--stopwords")
    return load_lexicons(val, emo, stop), {"valence": val, "emotions": emo, "stopwords": stop}


def _load_network(out: Path, kind: str, required: bool = True):
    path = out / "networks" / NETWORK_FILES[kind]
    if not path.is_file():
        if required:
            raise UsageError(f"--out: {path} not found; run `cognet build` first")
        return None, None
    return read_edgelist(path), path


def _focus_list(args) -> list[str]:
    focus = [f.lower() for f in (args.focus or [])]
    if getattr(args, "focus_file", None):
        p = _check_file(args.focus_file, "--focus-file")
        focus += sorted(read_stopwords(p)) if p else []
    seen = []
    for f in focus:
        if f not in seen:
            seen.append(f)
    return seen


# -- build ----------------------------------------------------------------------------

def cmd_build(args) -> int:
    out = Path(args.out)
    corpus_paths = [_check_file(p, "--corpus") for p in args.corpus]
    lex, lex_paths = _lexicons(args)
    fa_path = _check_file(args.fa, "--fa")
    ph_path = _check_file(args.person_placeholders, "--person-placeholders")
    placeholders = read_stopwords(ph_path) if ph_path else frozenset()

    docs, ids = [], []
    for p in corpus_paths:
        try:
            c = read_conllu(p, one_doc_per_file=args.one_doc_per_file)
        except IngestError as e:
            raise IngestError(f"--corpus {p}: {e}") from e
        docs.extend(c.documents)
        ids.extend(c.doc_ids)
    if len(set(ids)) != len(ids):
        raise IngestError("--corpus: duplicate document ids across files")
    corpus = normalize_lemmas(AnnotatedCorpus(tuple(docs), tuple(ids)), placeholders)

    co = build_co_network(corpus)
    extraction = extract_svo_triplets(corpus)
    svo = build_svo_network(extraction.triplets, args.min_weight)
    fa = None
    if fa_path:
        fa_data = load_free_associations(fa_path, placeholders)
        fa = build_fa_network(fa_data, restrict_to=co.nodes)

    inputs = {f"corpus{k}": p for k, p in enumerate(corpus_paths)}
    inputs.update(lex_paths)
    inputs["fa"] = fa_path
    inputs["person_placeholders"] = ph_path
    prov = _provenance(args, ["corpus", "valence", "emotions", "stopwords", "fa", "min_weight",
                              "one_doc_per_file", "person_placeholders"], inputs)

    nets = out / "networks"
    nets.mkdir(parents=True, exist_ok=True)
    write_edgelist(co, nets / NETWORK_FILES["CO"])
    write_edgelist(svo, nets / NETWORK_FILES["SVO"])
    if fa is not None:
        write_edgelist(fa, nets / NETWORK_FILES[FA])
    _write_csv(out / "networks" / "svo_triplets.csv", ["doc_id", "sentence", "subject", "verb", "object"],
               [(t.doc_id, t.sentence, t.subject, t.verb, t.object) for t in extraction.triplets])

    words = [sum(1 for s in d for t in s if t.upos != "PUNCT") for d in corpus.documents]
    lemmas = {t.lemma for d in corpus.documents for s in d for t in s if t.upos != "PUNCT"}
    meta = {
        "provenance": prov,
        "corpus": {
            "documents": len(corpus.documents),
            "sentences": corpus.n_sentences,
            "tokens": corpus.n_tokens,
            "words_per_document_mean": float(np.mean(words)),
            "words_per_document_sd": float(np.std(words, ddof=1)) if len(words) > 1 else 0.0,
            "vocabulary": len(lemmas),
            "vocabulary_without_stopwords": len(lemmas - lex.stopwords),
        },
        "networks": {
            "CO": {"nodes": co.n_nodes, "edges": co.n_edges},
            "SVO": {"nodes": svo.n_nodes, "edges": svo.n_edges, "min_weight": args.min_weight,
                    "triplets": len(extraction.triplets),
                    "skipped_no_verb": extraction.skipped_no_verb,
                    "skipped_no_subject": extraction.skipped_no_subject},
        },
        "lexicon_coverage": {
            "valence_lemmas": len(lex.valence),
            "emotion_vocabulary": len(lex.emotion_vocabulary),
            "co_nodes_with_valence": sum(1 for n in co.nodes if n in lex.valence),
        },
    }
    if fa is not None:
        meta["networks"]["FA"] = {"nodes": fa.n_nodes, "edges": fa.n_edges,
                                  "dropped_self_pairs": fa_data.dropped_self_pairs}
    _write_json(out / "build_metadata.json", meta)
    top = pair_document_counts(svo, args.top_pairs)
    _write_csv(out / "networks" / "svo_pair_documents.csv", ["lemma_a", "lemma_b", "documents"],
               [(a, b, n) for (a, b), n in top])
    print(f"built CO ({co.n_nodes} nodes), SVO ({svo.n_nodes} nodes)"
          + (f", FA ({fa.n_nodes} nodes)" if fa is not None else "") + f" -> {nets}")
    return 0


# -- balance ----------------------------------------------------------------------------

def cmd_balance(args) -> int:
    out = Path(args.out)
    lex, lex_paths = _lexicons(args)
    report = {}
    inputs = dict(lex_paths)
    for kind in args.networks:
        net, path = _load_network(out, kind, required=(kind == "CO"))
        if net is None:
            continue
        inputs[kind] = path
        snet = assign_signs(net, lex)

        def compute(snet=snet):
            r = balance_comparison(snet, lex, args.samples, args.seed, args.rewire_multiplier, args.workers)
            return {"report": r.as_dict(),
                    "realizations": {
                        DEGREE_REWIRE: [c.counts() | {"excluded": c.excluded} for c in r.rewire],
                        "LabelShuffle": [c.counts() | {"excluded": c.excluded} for c in r.shuffle]}}

        key = {"net": _sha256(path), "lex": {k: _sha256(p) for k, p in lex_paths.items() if p},
               "samples": args.samples, "seed": args.seed, "mult": args.rewire_multiplier}
        result = _cached(out, f"balance-{kind}", key, compute)
        report[kind] = result["report"]
        rows = []
        emp = result["report"]["empirical"]["counts"]
        rows.append(["empirical", 0, *emp.values(), result["report"]["empirical"]["excluded_zero_sign"]])
        for ens, items in result["realizations"].items():
            rows += [[ens, i, c["+++"], c["++-"], c["+--"], c["---"], c["excluded"]] for i, c in enumerate(items)]
        _write_csv(out / "balance" / f"{kind.lower()}_realizations.csv",
                   ["ensemble", "index", "+++", "++-", "+--", "---", "excluded"], rows)
        bars = []
        for ens, summ in result["report"]["null_models"].items():
            for t, ms in summ["fractions"].items():
                bars.append([ens, t, ms["mean"], ms["sd"]])
            bars.append([ens, "DoB", summ["degree_of_balance"]["mean"], summ["degree_of_balance"]["sd"]])
        for t, v in result["report"]["empirical"]["fractions"].items():
            bars.append(["empirical", t, v, 0.0])
        bars.append(["empirical", "DoB", result["report"]["empirical"]["degree_of_balance"], 0.0])
        _write_csv(out / "balance" / f"{kind.lower()}_triad_bars.csv", ["series", "triad", "mean", "sd"], bars)
    prov = _provenance(args, ["valence", "emotions", "stopwords", "networks", "seed", "samples",
                              "rewire_multiplier"], inputs)
    _write_json(out / "balance" / "balance_report.json", {"provenance": prov, "networks": report})
    print(f"balance report -> {out / 'balance' / 'balance_report.json'}")
    return 0


# -- structure --------------------------------------------------------------------------

def _valence_test(net, focus, lex):
    frame = net.neighbors(focus) - {focus}
    rest = [n for n in net.nodes if n not in frame and n != focus]
    out = {"focus": focus, "neighborhood_size": len(frame), "rest_size": len(rest)}
    for label, tag in (("negative", NEGATIVE), ("positive", POSITIVE)):
        k1 = sum(1 for n in frame if lex.valence_of(n) == tag)
        k2 = sum(1 for n in rest if lex.valence_of(n) == tag)
        try:
            out[label] = chi2_two_proportions(k1, len(frame), k2, len(rest)).as_dict()
        except ValueError as e:
            out[label] = {"error": str(e)}
    return out


def cmd_structure(args) -> int:
    out = Path(args.out)
    lex, lex_paths = _lexicons(args)
    svo, svo_path = _load_network(out, "SVO")
    if svo.n_nodes < 3:
        raise MetricError("SVO network has fewer than 3 nodes")
    report = {}
    node_frac, strength_frac = giant_component_stats(svo)
    report["giant_component"] = {"node_fraction": node_frac, "strength_fraction": strength_frac}
    gc_net = restrict_network(svo, giant_component(svo))
    part = girvan_newman_clusters(gc_net, min(args.clusters, gc_net.n_nodes), lex)
    report["clusters"] = part.as_dict()
    report["degeneracy"] = {"giant_component": degeneracy(gc_net) if gc_net.n_nodes >= 3 else None}
    if svo.n_nodes >= 10:
        sd = strength_distribution(svo)
        report["strength_distribution"] = sd.as_dict()
        _write_csv(out / "structure" / "strength_ccdf.csv", ["strength", "ccdf"], sd.ccdf)
    st = svo.strength()
    hubs = [n for n, _ in sorted(st.items(), key=lambda kv: (-kv[1], kv[0]))][: args.hubs]
    targets = hubs + [f for f in _focus_list(args) if f not in hubs and f in svo]

    def compute():
        fit = fit_soft_weighted_cm(svo, tolerance=args.tolerance)
        spec = NullEnsembleSpec(SOFT_WEIGHTED_CM, args.samples, args.seed)
        samples = sample_soft_cm(fit, spec, kind="SVO", workers=args.workers)
        return {"residual": fit.residual, "iterations": fit.iterations,
                "null": [null_shrinkage(s, targets) for s in samples]}

    key = {"net": _sha256(svo_path), "samples": args.samples, "seed": args.seed, "targets": targets,
           "tol": args.tolerance}
    cached = _cached(out, "softcm-shrinkage", key, compute)
    result = summarize_shrinkage(shrinkage(svo, targets), cached["null"], targets)
    report["shrinkage"] = result.as_dict()
    report["soft_cm"] = {"residual": cached["residual"], "iterations": cached["iterations"]}
    _write_csv(out / "structure" / "shrinkage.csv",
               ["lemma", "shrinkage", "null_low", "null_high", "null_mean", "p_lower", "p_upper"],
               [(r.lemma, r.shrinkage, r.null_low, r.null_high, r.null_mean, r.p_lower, r.p_upper)
                for r in result.nodes])
    focus_reports = {}
    for f in _focus_list(args):
        if f not in svo:
            focus_reports[f] = {"missing": True}
            continue
        det = detached_nodes(svo, f)
        gc_size = len(giant_component(svo))
        neg_total = sum(1 for n in svo.nodes if lex.valence_of(n) == NEGATIVE)
        neg_det = sum(1 for n in det if lex.valence_of(n) == NEGATIVE)
        focus_reports[f] = {
            "valence_test": _valence_test(svo, f, lex),
            "detached_nodes": len(det),
            "detached_fraction_of_giant_component": len(det) / gc_size if gc_size else None,
            "detached_negative": neg_det,
            "negative_total": neg_total,
        }
    report["focus"] = focus_reports
    top = pair_document_counts(svo, args.top_pairs)
    report["pair_document_counts"] = [[a, b, n] for (a, b), n in top]
    _write_json(out / "structure" / "partition.json", part.labels())
    prov = _provenance(args, ["valence", "emotions", "stopwords", "seed", "samples", "clusters", "hubs",
                              "focus", "tolerance", "top_pairs"], dict(lex_paths, svo=svo_path))
    _write_json(out / "structure" / "structure_report.json", {"provenance": prov, "svo": report})
    print(f"structure report -> {out / 'structure' / 'structure_report.json'}")
    return 0


# -- profile ------------------------------------------------------------------------------

def cmd_profile(args) -> int:
    out = Path(args.out)
    lex, lex_paths = _lexicons(args)
    co, co_path = _load_network(out, "CO")
    fa, fa_path = _load_network(out, "FA", required=False)
    stop = lex.stopwords
    report = {"rankings": {}}
    rankings = {"CO": closeness_ranking(co, stop)}
    if fa is not None:
        rankings["FA"] = closeness_ranking(fa, stop)
        rankings["CO_restricted"] = closeness_ranking(restrict_network(co, fa.nodes), stop)
    for name, r in rankings.items():
        report["rankings"][name] = [[n, s, k] for n, s, k in r.top(args.top)]
    depth = args.top
    rows = []
    for k in range(depth):
        row = [k + 1]
        for name in rankings:
            e = rankings[name].entries
            row.append(e[k][0] if k < len(e) else None)
        rows.append(row)
    _write_csv(out / "profile" / "closeness_table.csv", ["rank", *rankings], rows)

    targets = [n for n, _, _ in rankings["CO"].top(args.rank_drop_top)]

    def compute():
        spec = NullEnsembleSpec(DEGREE_REWIRE, args.samples, args.seed, args.rewire_multiplier)
        ens = degree_rewire(co, spec, args.workers)
        return [closeness_ranking(s, stop).ranks() for s in ens]

    key = {"net": _sha256(co_path), "samples": args.samples, "seed": args.seed,
           "mult": args.rewire_multiplier, "stop": sorted(stop)}
    null_ranks = _cached(out, "rewire-closeness", key, compute)
    scores = {n: sc for n, sc, _ in rankings["CO"].entries}
    drops = [d.as_dict() | {"closeness": scores[d.lemma]}
             for d in rank_drop_from_ranks(rankings["CO"].ranks(), null_ranks, targets)]
    report["rank_drop"] = drops
    _write_csv(out / "profile" / "rank_drop.csv",
               ["lemma", "empirical_rank", "mean_null_rank", "drop", "p_value", "significant"],
               [(d["lemma"], d["empirical_rank"], d["mean_null_rank"], d["drop"], d["p_value"],
                 d["significant"]) for d in drops])

    profiles = {}
    zrows = []
    wheels = []
    for focus in _focus_list(args):
        entry = {}
        for name, net in (("CO", co), ("FA", fa)):
            if net is None:
                continue
            if focus not in net:
                entry[name] = {"missing": True}
                continue
            frame = semantic_frame(net, focus, stop)
            if frame.empty:
                entry[name] = {"empty_frame": True}
                continue
            prof = emotion_profile(frame, lex, args.samples, args.seed)
            entry[name] = prof.as_dict()
            wheels.append(wheel_export(prof))
            zrows.append([focus, name, *[s.z for s in prof.scores]])
        if fa is not None and focus in co and focus in fa:
            try:
                cmp = profile_comparison(co, fa, focus, lex, args.samples, args.seed)
                entry["comparison"] = {"significant_only_in_CO": list(cmp.only_a),
                                       "significant_only_in_FA": list(cmp.only_b)}
            except ProfileError as e:
                entry["comparison"] = {"error": str(e)}
        profiles[focus] = entry
    report["profiles"] = profiles
    _write_csv(out / "profile" / "emotion_z.csv", ["focus", "network", *EMOTIONS], zrows)
    _write_json(out / "profile" / "wheels.json", wheels)
    prov = _provenance(args, ["valence", "emotions", "stopwords", "seed", "samples", "focus", "focus_file",
                              "top", "rank_drop_top", "rewire_multiplier"],
                       dict(lex_paths, co=co_path, fa=fa_path))
    _write_json(out / "profile" / "profile_report.json", {"provenance": prov, **report})
    print(f"profile report -> {out / 'profile' / 'profile_report.json'}")
    return 0


# -- argument parsing -----------------------------------------------------------------------

def _add_lexicon_flags(p):
    p.add_argument("--valence", required=True, help="TSV lemma<TAB>score")
    p.add_argument("--emotions", required=True, help="TSV lemma<TAB>emotion<TAB>flag")
    p.add_argument("--stopwords", help="one lemma per line")


def _add_run_flags(p, samples=1000):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=samples, help="null-model realizations")
    p.add_argument("--workers", type=int, default=None, help="parallel workers (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cognet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cognet {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build CO, SVO and FA networks")
    b.add_argument("--corpus", required=True, nargs="+", help="CoNLL-U file(s)")
    _add_lexicon_flags(b)
    b.add_argument("--fa", help="TSV cue<TAB>response[<TAB>count]")
    b.add_argument("--person-placeholders", help="placeholder names merged into s/he, one per line")
    b.add_argument("--min-weight", type=int, default=2)
    b.add_argument("--one-doc-per-file", action="store_true")
    b.add_argument("--top-pairs", type=int, default=30)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    bal = sub.add_parser("balance", help="signed triad census against null models")
    _add_lexicon_flags(bal)
    _add_run_flags(bal)
    bal.add_argument("--networks", nargs="+", default=["CO", "FA"], choices=["CO", "FA", "SVO"])
    bal.add_argument("--rewire-multiplier", type=int, default=10)
    bal.add_argument("--out", required=True)
    bal.set_defaults(func=cmd_balance)

    st = sub.add_parser("structure", help="SVO structure: clusters, tail, shrinkage, valence test")
    _add_lexicon_flags(st)
    _add_run_flags(st)
    st.add_argument("--focus", action="append", help="focus lemma (repeatable; default: i)")
    st.add_argument("--focus-file")
    st.add_argument("--clusters", type=int, default=4)
    st.add_argument("--hubs", type=int, default=10)
    st.add_argument("--tolerance", type=float, default=1e-8)
    st.add_argument("--top-pairs", type=int, default=30)
    st.add_argument("--out", required=True)
    st.set_defaults(func=cmd_structure)

    pr = sub.add_parser("profile", help="closeness rankings, rank drop and emotional profiles")
    _add_lexicon_flags(pr)
    _add_run_flags(pr)
    pr.add_argument("--focus", action="append", help="focus lemma (repeatable)")
    pr.add_argument("--focus-file", help="focus lemmas, one per line")
    pr.add_argument("--top", type=int, default=30)
    pr.add_argument("--rank-drop-top", type=int, default=40)
    pr.add_argument("--rewire-multiplier", type=int, default=10)
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "samples", 1) is not None and getattr(args, "samples", 1) < 1:
        parser.error("--samples must be >= 1")
    if args.command == "structure" and not args.focus and not args.focus_file:
        args.focus = ["i"]
    if args.command == "build" and args.min_weight < 1:
        parser.error("--min-weight must be >= 1")
    try:
        return args.func(args)
    except (UsageError, IngestError, FileNotFoundError) as e:
        print(f"cognet {args.command}: error: {e}", file=sys.stderr)
        return 2
    except (MetricError, NullModelError, ProfileError, ValueError) as e:
        print(f"cognet {args.command}: analysis error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

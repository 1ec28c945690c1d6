"""Command-line entry point.

Subcommands follow the pipeline order: ``tag`` (fallback annotation),
``terms`` / ``mine`` (statistical discovery), ``match`` (anchored
extraction), ``review apply`` / ``review serve`` (expert stage),
``extend`` (produce the extended ontology), ``validate``.

Exit codes: 0 success, 1 usage error, 2 data error.  Every command is
reproducible: identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ontoharvest import corpus as corpus_mod
from ontoharvest import discovery, extension, matching, templates, turtle
from ontoharvest import session as session_mod
from ontoharvest.session import Session

USAGE_ERROR = 1
DATA_ERROR = 2

CONFIG_KEYS = {
    "base", "templates", "corpus", "lexicon", "synonyms", "deverbal",
    "session", "min_freq", "min_support", "window", "anchors",
}


class CliError(Exception):
    def __init__(self, message: str, code: int = DATA_ERROR):
        self.code = code
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we use 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    config = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, _, value = body.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise CliError(f"{path}:{lineno}: unknown config key {key!r}")
        config[key] = value.strip()
    return config


def _setting(args, config: dict[str, str], key: str, flag_value, default=None):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _read(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {what} {path}: {exc}")


def _write(path: str, text: str, what: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {what} {path}: {exc}")


def _load_corpus(path: str) -> list:
    try:
        return corpus_mod.read_conllu(_read(path, "corpus"), doc_id=Path(path).stem)
    except corpus_mod.CorpusError as exc:
        raise CliError(f"{path}: {exc}")


def _load_base(path: str):
    try:
        return turtle.parse(_read(path, "base ontology"))
    except turtle.TurtleParseError as exc:
        raise CliError(f"{path}: {exc}")


def _anchor_lemmas(base, extras: str | None) -> set[str]:
    anchors = {cid for cid in base.concepts if cid != base.root}
    if extras:
        anchors |= {a.strip() for a in extras.split(",") if a.strip()}
    return anchors


# -- subcommands -------------------------------------------------------------


def cmd_tag(args) -> int:
    config = load_config(args.config)
    lexicon_path = _setting(args, config, "lexicon", args.lexicon)
    if lexicon_path is None:
        raise CliError("tag requires --lexicon (or lexicon= in config)", USAGE_ERROR)
    try:
        lexicon = corpus_mod.load_lexicon(_read(lexicon_path, "lexicon"))
    except corpus_mod.CorpusError as exc:
        raise CliError(f"{lexicon_path}: {exc}")
    raw = _read(args.raw_text, "raw text")
    sentences = corpus_mod.tag_with_lexicon(raw, lexicon, doc_id=Path(args.raw_text).stem)
    out = corpus_mod.write_conllu(sentences)
    if args.output:
        _write(args.output, out, "corpus")
    else:
        sys.stdout.write(out)
    return 0


def cmd_terms(args) -> int:
    config = load_config(args.config)
    min_freq = int(_setting(args, config, "min_freq", args.min_freq, 1))
    sentences = _load_corpus(args.corpus)
    for term in discovery.extract_terms(sentences, min_freq=min_freq):
        print(f"{term.score:.4f}\t{term.frequency}\t{' '.join(term.lemmas)}")
    return 0


def cmd_mine(args) -> int:
    config = load_config(args.config)
    window = int(_setting(args, config, "window", args.window, 2))
    min_support = int(_setting(args, config, "min_support", args.min_support, 2))
    base_path = _setting(args, config, "base", args.base)
    extras = _setting(args, config, "anchors", args.anchors)
    if base_path is None and not extras:
        raise CliError("mine needs --base and/or --anchors to know the anchor lemmas", USAGE_ERROR)
    anchors = set()
    if base_path is not None:
        anchors |= _anchor_lemmas(_load_base(base_path), None)
    if extras:
        anchors |= {a.strip() for a in extras.split(",") if a.strip()}
    sentences = _load_corpus(args.corpus)
    try:
        structures = discovery.mine_structures(
            sentences, anchors, window=window, min_support=min_support
        )
    except ValueError as exc:
        raise CliError(str(exc), USAGE_ERROR)
    for sc in structures:
        print(f"{sc.render()}\t{sc.support}")
    if args.emit_templates:
        drafts = []
        for i, sc in enumerate(structures, start=1):
            try:
                drafts.append(discovery.to_template(sc, name=f"draft{i}"))
            except ValueError:
                continue
        _write(
            args.emit_templates,
            "\n".join(templates.render_template(t) for t in drafts),
            "draft templates",
        )
    return 0


def cmd_match(args) -> int:
    config = load_config(args.config)
    template_path = _setting(args, config, "templates", args.templates)
    base_path = _setting(args, config, "base", args.base)
    if template_path is None or base_path is None:
        raise CliError("match requires --templates and --base", USAGE_ERROR)
    try:
        template_list = templates.parse_templates(_read(template_path, "templates"))
    except templates.TemplateError as exc:
        raise CliError(f"{template_path}: {exc}")
    template_list = [t for t in template_list if not t.draft]
    base = _load_base(base_path)
    deverbal_path = _setting(args, config, "deverbal", args.deverbal)
    deverbal = (
        extension.load_deverbal(_read(deverbal_path, "deverbal lexicon"))
        if deverbal_path
        else {}
    )
    extras = _setting(args, config, "anchors", args.anchors)
    anchors = _anchor_lemmas(base, extras)
    sentences = _load_corpus(args.corpus)
    matches = matching.apply_all(
        template_list, sentences, anchors, workers=args.workers
    )
    candidates = extension.normalize(matches, deverbal)
    out = extension.write_candidates(candidates)
    if args.output:
        _write(args.output, out, "candidates")
    else:
        sys.stdout.write(out)
    return 0


def _open_session(args, config) -> Session:
    session_dir = _setting(args, config, "session", args.session)
    if session_dir is None:
        raise CliError("a session directory is required (--session)", USAGE_ERROR)
    directory = Path(session_dir)
    base_arg = getattr(args, "base", None)
    candidates_arg = getattr(args, "candidates", None)
    if base_arg and candidates_arg and not (directory / session_mod.BASE_FILE).exists():
        return Session.init(
            directory,
            _read(base_arg, "base ontology"),
            _read(candidates_arg, "candidates"),
        )
    try:
        return Session.load(directory)
    except session_mod.SessionError as exc:
        raise CliError(str(exc))


def cmd_review_apply(args) -> int:
    config = load_config(args.config)
    session = _open_session(args, config)
    if not args.auto_accept and args.decisions is None:
        raise CliError("review apply needs a decisions file or --auto-accept", USAGE_ERROR)
    if args.decisions is not None:
        items = session_mod.read_decisions(_read(args.decisions, "decisions"))
        report = session.apply_decisions(items)
        sys.stdout.write(report.render())
    if args.auto_accept:
        print("auto-accept: accepting every pending candidate", file=sys.stderr)
        report = session.auto_accept()
        sys.stdout.write(report.render())
    return 0


def cmd_review_serve(args) -> int:
    config = load_config(args.config)
    session = _open_session(args, config)
    from ontoharvest import service

    static_dir = Path(args.ui) if args.ui else None
    if static_dir is not None and not static_dir.is_dir():
        raise CliError(f"UI directory not found: {static_dir}")
    service.serve(session, port=args.port, static_dir=static_dir)
    return 0


def cmd_extend(args) -> int:
    config = load_config(args.config)
    session = _open_session(args, config)
    result = session.finalize()
    extended_text = turtle.serialize(result.ontology)
    if args.output:
        _write(args.output, extended_text, "extended ontology")
    if args.diff:
        _write(args.diff, result.diff.render(), "diff report")
    for skip in result.skipped:
        print(f"skipped {skip.candidate_id}: {skip.reason}", file=sys.stderr)
    if not args.output and not args.diff:
        sys.stdout.write(extended_text)
    return 0


def cmd_validate(args) -> int:
    onto = _load_base(args.ontology)
    violations = onto.validate()
    for v in violations:
        print(str(v))
    return DATA_ERROR if violations else 0


# -- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="ontoharvest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="flat key=value config file; flags override")

    p = sub.add_parser("tag", help="tag raw text with the fallback lexicon tagger")
    p.add_argument("raw_text")
    p.add_argument("--lexicon")
    p.add_argument("-o", "--output")
    add_config(p)
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("terms", help="ranked candidate-term table (C-value)")
    p.add_argument("corpus")
    p.add_argument("--min-freq", type=int, default=None)
    add_config(p)
    p.set_defaults(func=cmd_terms)

    p = sub.add_parser("mine", help="frequent structures around anchor lemmas")
    p.add_argument("corpus")
    p.add_argument("--base")
    p.add_argument("--anchors", help="extra anchor lemmas, comma separated")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--min-support", type=int, default=None)
    p.add_argument("--emit-templates", help="write draft templates to this file")
    add_config(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("match", help="anchored template extraction to candidates")
    p.add_argument("corpus")
    p.add_argument("--templates")
    p.add_argument("--base")
    p.add_argument("--deverbal")
    p.add_argument("--anchors", help="extra anchor lemmas, comma separated")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("-o", "--output")
    add_config(p)
    p.set_defaults(func=cmd_match)

    review = sub.add_parser("review", help="expert review workflow")
    review_sub = review.add_subparsers(dest="review_command", required=True)

    p = review_sub.add_parser("apply", help="apply a batch decision file")
    p.add_argument("decisions", nargs="?")
    p.add_argument("--session", required=False)
    p.add_argument("--base", help="base ontology for first-time session init")
    p.add_argument("--candidates", help="candidates file for first-time session init")
    p.add_argument("--auto-accept", action="store_true",
                   help="accept every pending candidate (tests/CI only)")
    add_config(p)
    p.set_defaults(func=cmd_review_apply)

    p = review_sub.add_parser("serve", help="start the review HTTP service")
    p.add_argument("--session", required=False)
    p.add_argument("--base", help="base ontology for first-time session init")
    p.add_argument("--candidates", help="candidates file for first-time session init")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--ui", help="directory of built UI assets to serve at /")
    add_config(p)
    p.set_defaults(func=cmd_review_serve)

    p = sub.add_parser("extend", help="finalize: apply accepted candidates")
    p.add_argument("--session", required=False)
    p.add_argument("-o", "--output")
    p.add_argument("--diff")
    add_config(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("validate", help="check an ontology file; nonzero on violations")
    p.add_argument("ontology")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"ontoharvest: {exc}", file=sys.stderr)
        return exc.code
    except (corpus_mod.CorpusError, templates.TemplateError, turtle.TurtleParseError) as exc:
        print(f"ontoharvest: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())

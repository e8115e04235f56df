"""Command-line entry points for the pipeline and the service.

    skillrec train-sentence-classifier --corpus vacancies.jsonl --out model.json
    skillrec extract-skills --corpus vacancies.jsonl --model model.json --out skills.json
    skillrec ingest-videos --videos raw.jsonl --skills skills.json --vectors glove.txt --out catalog.jsonl
    skillrec train-fit --catalog catalog.jsonl --split 0.7 --seed 0 --out fit_model.json
    skillrec simulate --users 20 --rounds 10 --seed 0
    skillrec serve --store DIR --port 8000
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import catalog as catalog_mod
from . import fit_model as fit_mod
from . import skill_mining, text_core
from .embeddings import WordVectorStore
from .providers import FixtureProvider, HttpEncyclopediaProvider
from .simulate import SimulationConfig, run_simulation
from .store import Store, skill_to_dict


def _stopwords(args) -> set[str]:
    if getattr(args, "stopwords", None):
        return text_core.load_stopwords(args.stopwords)
    return text_core.default_stopwords()


def cmd_train_sentence_classifier(args) -> int:
    data = skill_mining.load_vacancy_corpus(args.corpus, _stopwords(args))
    train, test = skill_mining.seeded_split(data, args.split, args.seed)
    config = skill_mining.ClassifierConfig(epochs=args.epochs, seed=args.seed)
    model = skill_mining.train_sentence_classifier(train, config)
    model.save(args.out)
    metrics = skill_mining.evaluate_f1(model, test) if test else {}
    print(json.dumps({"sentences": len(data), "model": args.out, **metrics}, indent=2))
    return 0


def cmd_extract_skills(args) -> int:
    stopwords = _stopwords(args)
    model = skill_mining.SentenceClassifierModel.load(args.model)
    data = skill_mining.load_vacancy_corpus(args.corpus, stopwords)
    positives = [
        ls.sentence
        for ls in data
        if skill_mining.classify_sentence(model, ls.sentence)["label"] == 1
    ]
    skills = skill_mining.extract_skill_terms(
        positives, min_df=args.min_df, max_n=args.max_n, top_k=args.top_k
    )
    provider = None
    if args.descriptions:
        provider = FixtureProvider.from_file(args.descriptions)
    elif args.encyclopedia_url:
        provider = HttpEncyclopediaProvider(args.encyclopedia_url)
    if provider is not None:
        skills = [skill_mining.enrich_description(s, provider) for s in skills]
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump([skill_to_dict(s) for s in skills], fh, indent=2)
        fh.write("\n")
    print(json.dumps({"positive_sentences": len(positives), "skills": len(skills), "out": args.out}))
    return 0


def cmd_ingest_videos(args) -> int:
    with open(args.skills, encoding="utf-8") as fh:
        skills = [skill_mining.SkillRecord(**raw) for raw in json.load(fh)]
    store = WordVectorStore.load(args.vectors) if args.vectors else None
    provider = FixtureProvider.from_file(args.transcripts) if args.transcripts else None
    stopwords = None if args.no_stopword_filter else _stopwords(args)
    videos, groups = catalog_mod.ingest_catalog(
        args.videos, store, skills, stopwords=stopwords, transcript_provider=provider
    )
    catalog_mod.write_catalog(args.out, videos)
    print(json.dumps({"videos": len(videos), "skill_groups": len(groups), "out": args.out}))
    return 0


def cmd_train_fit(args) -> int:
    videos = []
    with open(args.catalog, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                videos.append(catalog_mod.record_from_dict(json.loads(line), args.catalog, lineno))
    groups = catalog_mod.build_groups(videos)
    labeled = [
        (catalog_mod.fit_features(v, groups[v.target_skill]), v.fit_label)
        for v in videos
        if v.fit_label is not None
    ]
    if not labeled:
        print("no records with fit_label in catalog", file=sys.stderr)
        return 1
    train, test = skill_mining.seeded_split(labeled, args.split, args.seed)
    model = fit_mod.train_fit_model(train, fit_mod.ForestConfig(n_trees=args.trees, seed=args.seed))
    model.save(args.out)
    metrics = fit_mod.evaluate_fit_f1(model, test) if test else {}
    importances = dict(zip(fit_mod.FEATURE_NAMES, fit_mod.feature_importances(model).tolist()))
    print(json.dumps({"labeled": len(labeled), "importances": importances, **metrics}, indent=2))
    return 0


def cmd_simulate(args) -> int:
    report = run_simulation(SimulationConfig(users=args.users, rounds=args.rounds, seed=args.seed))
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    Store(args.store).initialize()
    uvicorn.run(create_app(args.store), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skillrec")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-sentence-classifier", help="train the skill-sentence classifier")
    p.add_argument("--corpus", required=True, help="vacancy JSONL file")
    p.add_argument("--stopwords", help="stop-word list, one token per line")
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_sentence_classifier)

    p = sub.add_parser("extract-skills", help="mine ranked skill records from a vacancy corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True, help="trained sentence classifier")
    p.add_argument("--stopwords")
    p.add_argument("--out", required=True)
    p.add_argument("--min-df", type=int, default=3)
    p.add_argument("--max-n", type=int, default=text_core.DEFAULT_MAX_N)
    p.add_argument("--top-k", type=int, default=16)
    p.add_argument("--descriptions", help="JSON fixture of skill descriptions")
    p.add_argument("--encyclopedia-url", help="base URL of a wiki-style summary API")
    p.set_defaults(func=cmd_extract_skills)

    p = sub.add_parser("ingest-videos", help="validate and featurize a raw video JSONL file")
    p.add_argument("--videos", required=True)
    p.add_argument("--skills", required=True, help="skills.json from extract-skills")
    p.add_argument("--vectors", help="word-vector file for text similarity")
    p.add_argument("--stopwords")
    p.add_argument("--no-stopword-filter", action="store_true",
                   help="average embeddings over all tokens, not just non-stop-words")
    p.add_argument("--transcripts", help="JSON fixture mapping video id to transcript")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest_videos)

    p = sub.add_parser("train-fit", help="train the video-fit random forest")
    p.add_argument("--catalog", required=True)
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_fit)

    p = sub.add_parser("simulate", help="run the simulated-learner evaluation")
    p.add_argument("--users", type=int, default=20)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="serve the recommendation API over a store directory")
    p.add_argument("--store", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

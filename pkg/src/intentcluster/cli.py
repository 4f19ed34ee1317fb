"""Command line interface.

Subcommands: embed, cluster, eval, summarize, serve, bench. Exit code 0 on
success, 2 on validation errors (bad arguments, malformed inputs).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench as bench_mod
from . import corpus as corpus_io
from .community import WeightedGraph, load_partition, louvain
from .embed import base_embed
from .kmeans import kmeans
from .knn import build_knn_graph
from .metrics import evaluate
from .project import DEFAULT_EMBED_DIM
from .summarize import summarize_partition


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intentcluster")
    parser.add_argument("--seed", type=int, default=0, help="global random seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="compute base embeddings for a corpus")
    p_embed.add_argument("corpus", help="line-delimited JSON corpus file")
    p_embed.add_argument("-o", "--out", required=True, help="output .emb file")
    p_embed.add_argument("--dim", type=int, default=DEFAULT_EMBED_DIM)

    p_cluster = sub.add_parser("cluster", help="cluster a corpus (auto-k or fixed-k)")
    p_cluster.add_argument("corpus")
    p_cluster.add_argument("--embeddings", help="reuse a precomputed .emb file")
    p_cluster.add_argument("--mode", choices=["auto", "fixed_k"], default="auto")
    p_cluster.add_argument("--k", type=int, help="cluster count (fixed_k mode)")
    p_cluster.add_argument("--knn-k", type=int, default=10)
    p_cluster.add_argument("--dim", type=int, default=DEFAULT_EMBED_DIM)
    p_cluster.add_argument("--threads", type=int, default=1)
    p_cluster.add_argument("-o", "--out", required=True, help="partition dump file")

    p_eval = sub.add_parser("eval", help="score a partition against corpus labels")
    p_eval.add_argument("corpus", help="corpus file with label fields as truth")
    p_eval.add_argument("partition", help="partition dump file")

    p_sum = sub.add_parser("summarize", help="top bigrams per cluster")
    p_sum.add_argument("corpus")
    p_sum.add_argument("partition")
    p_sum.add_argument("--top", type=int, default=5)
    p_sum.add_argument("--max-clusters", type=int, default=None)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")

    p_bench = sub.add_parser("bench", help="phase-timing benchmark on synthetic corpora")
    p_bench.add_argument("--sizes", default="1000,10000,50000", help="comma-separated corpus sizes")
    p_bench.add_argument("--threads", default="1,4", help="comma-separated thread counts")
    p_bench.add_argument("-o", "--out", help="write CSV here instead of stdout")

    return parser


def _load_docs(path: str):
    docs = corpus_io.load_corpus(path)
    if not docs:
        raise ValueError(f"{path}: corpus is empty")
    return docs


def _cmd_embed(args) -> None:
    docs = _load_docs(args.corpus)
    matrix = base_embed(docs, args.dim, args.seed)
    corpus_io.save_embeddings(matrix, args.out)
    print(f"embedded {len(docs)} documents -> {args.out} ({matrix.shape[0]}x{matrix.shape[1]})")


def _cmd_cluster(args) -> None:
    docs = _load_docs(args.corpus)
    if args.embeddings:
        matrix = corpus_io.load_embeddings(args.embeddings)
        if matrix.shape[0] != len(docs):
            raise ValueError(
                f"embeddings have {matrix.shape[0]} rows, corpus has {len(docs)} documents"
            )
    else:
        matrix = base_embed(docs, args.dim, args.seed)
    if args.mode == "auto":
        knn_k = min(args.knn_k, len(docs) - 1)
        graph = build_knn_graph(matrix, knn_k, threads=args.threads)
        partition = louvain(WeightedGraph.from_knn_graph(graph), seed=args.seed)
    else:
        if args.k is None:
            raise ValueError("fixed_k mode requires --k")
        partition = kmeans(matrix, args.k, seed=args.seed).partition
    partition.dump(args.out)
    print(f"{partition.n_clusters} clusters over {len(docs)} documents -> {args.out}")


def _cmd_eval(args) -> None:
    docs = _load_docs(args.corpus)
    partition = load_partition(args.partition)
    missing = [doc.id for doc in docs if doc.label is None]
    if missing:
        raise ValueError(f"document '{missing[0]}' has no label in {args.corpus}")
    report = evaluate(partition, [doc.label for doc in docs])
    print(json.dumps(report.to_dict(), indent=2))


def _cmd_summarize(args) -> None:
    docs = _load_docs(args.corpus)
    partition = load_partition(args.partition)
    summaries = summarize_partition(docs, partition, args.top, args.max_clusters)
    print(json.dumps([s.to_dict() for s in summaries], indent=2))


def _cmd_serve(args) -> None:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)


def _cmd_bench(args) -> None:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    threads = [int(t) for t in args.threads.split(",") if t]
    if not sizes or not threads:
        raise ValueError("--sizes and --threads must be non-empty")
    rows = bench_mod.run_bench(sizes, threads, seed=args.seed)
    csv = bench_mod.bench_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    for line in bench_mod.knn_thread_ratios(rows):
        print(line, file=sys.stderr)
    for line in bench_mod.size_scaling_report(rows, threads=threads[0]):
        print(line, file=sys.stderr)


_COMMANDS = {
    "embed": _cmd_embed,
    "cluster": _cmd_cluster,
    "eval": _cmd_eval,
    "summarize": _cmd_summarize,
    "serve": _cmd_serve,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

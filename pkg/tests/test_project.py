import numpy as np
import pytest

from intentcluster.corpus import Document
from intentcluster.embed import TrainConfig
from intentcluster.project import ClusterJobRequest, Project
from intentcluster.synth import grouped_corpus


@pytest.fixture
def blob_project():
    project = Project("blobs", embed_dim=32)
    docs, truth = grouped_corpus(120, 3, seed=1, vocab_per_group=20, shared_vocab=0)
    project.set_corpus(docs)
    return project, docs, truth


class TestJobs:
    def test_auto_recovers_blobs(self, blob_project):
        project, docs, truth = blob_project
        result = project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        from intentcluster.metrics import purity

        assert result.partition.method == "louvain"
        assert result.partition.n_clusters == 3
        assert purity(result.partition, truth) == 1.0
        assert result.summaries[0].size == max(s.size for s in result.summaries)
        assert project.partition is result.partition
        assert project.jobs[-1].status == "done"
        assert project.jobs[-1].partition_digest == result.digest

    def test_fixed_k_scope_size_gives_singletons(self, blob_project):
        project, docs, _ = blob_project
        scope = [d.id for d in docs[:5]]
        result = project.run_cluster_job(
            ClusterJobRequest(mode="fixed_k", k=5, seed=0, scope=scope)
        )
        assert result.partition.n_clusters == 5
        assert sorted(result.partition.assignment.tolist()) == list(range(5))

    def test_same_seed_identical_partitions(self, blob_project):
        project, *_ = blob_project
        r1 = project.run_cluster_job(ClusterJobRequest(mode="auto", seed=7))
        r2 = project.run_cluster_job(ClusterJobRequest(mode="auto", seed=7))
        assert np.array_equal(r1.partition.assignment, r2.partition.assignment)
        assert r1.digest == r2.digest
        assert [s.to_dict() for s in r1.summaries] == [s.to_dict() for s in r2.summaries]

    def test_eval_attached_iff_scope_labeled(self, blob_project):
        project, docs, truth = blob_project
        result = project.run_cluster_job(ClusterJobRequest(mode="auto", seed=0))
        assert result.report is None  # nothing labeled yet
        project.label_docs([d.id for d in docs], "all-same")
        result = project.run_cluster_job(ClusterJobRequest(mode="auto", seed=0))
        assert result.report is not None

    def test_scope_validation(self, blob_project):
        project, docs, _ = blob_project
        with pytest.raises(ValueError, match="unknown document id"):
            project.run_cluster_job(ClusterJobRequest(mode="auto", scope=["nope"]))
        with pytest.raises(ValueError, match="at least 2"):
            project.run_cluster_job(ClusterJobRequest(mode="auto", scope=[docs[0].id]))
        with pytest.raises(ValueError, match="exceeds scope"):
            project.run_cluster_job(
                ClusterJobRequest(mode="fixed_k", k=10, scope=[d.id for d in docs[:4]])
            )
        with pytest.raises(ValueError, match="mode"):
            ClusterJobRequest(mode="something")

    def test_failed_job_recorded(self, blob_project):
        project, docs, _ = blob_project
        with pytest.raises(ValueError):
            project.run_cluster_job(ClusterJobRequest(mode="fixed_k", k=10**6))
        assert project.jobs[-1].status == "failed"
        assert "scope" in project.jobs[-1].error


class TestLabeling:
    def test_bulk_label_whole_cluster(self, blob_project):
        project, docs, _ = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        size = int(project.partition.sizes()[0])
        count, revision = project.bulk_label(0, "billing")
        assert count == size
        assert revision == 1
        members = project.partition.members(0)
        assert all(project.labels[docs[int(r)].id] == "billing" for r in members)
        assert all(docs[int(r)].label == "billing" for r in members)  # mirror

    def test_relabel_overwrites(self, blob_project):
        project, docs, _ = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        count1, _ = project.bulk_label(0, "billing")
        count2, revision = project.bulk_label(0, "refunds")
        assert count1 == count2
        assert revision == 2
        members = project.partition.members(0)
        assert all(project.labels[docs[int(r)].id] == "refunds" for r in members)

    def test_revision_counts_mutations(self, blob_project):
        project, docs, _ = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        assert project.revision == 0
        project.bulk_label(0, "a")
        project.bulk_label(1, "b")
        assert project.revision == 2

    def test_labeling_requires_partition(self):
        project = Project("empty")
        project.set_corpus([Document.make("a", "x"), Document.make("b", "y")])
        with pytest.raises(ValueError, match="no clustering job"):
            project.bulk_label(0, "label")

    def test_unknown_cluster(self, blob_project):
        project, *_ = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        with pytest.raises(ValueError, match="unknown cluster"):
            project.bulk_label(999, "label")

    def test_label_never_mutates_partition(self, blob_project):
        project, *_ = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        before = project.partition.assignment.copy()
        project.bulk_label(0, "x")
        assert np.array_equal(project.partition.assignment, before)

    def test_empty_label_rejected(self, blob_project):
        project, docs, _ = blob_project
        with pytest.raises(ValueError, match="non-empty"):
            project.label_docs([docs[0].id], "   ")


class TestSubcluster:
    def test_two_level_hierarchy_recovered(self):
        # 2 super-groups x 2 sub-groups; the analyst splits the corpus into the
        # two known super-groups, then auto sub-clustering surfaces the sub-blobs
        rng = np.random.default_rng(3)
        docs, sup_truth, sub_truth = [], [], []
        for i in range(200):
            sup, sub = (i % 2), (i // 2) % 2
            words = [f"sup{sup}w{w}" for w in rng.integers(0, 10, size=16)]
            words += [f"s{sup}sub{sub}w{w}" for w in rng.integers(0, 4, size=10)]
            docs.append(Document.make(f"d{i}", " ".join(words)))
            sup_truth.append(f"sup{sup}")
            sub_truth.append(f"{sup}.{sub}")
        project = Project("hier", embed_dim=32)
        project.set_corpus(docs)
        result = project.run_cluster_job(ClusterJobRequest(mode="fixed_k", k=2, seed=0))
        from intentcluster.metrics import purity as _purity

        assert result.partition.n_clusters == 2
        assert _purity(result.partition, sup_truth) == 1.0
        child = project.subcluster(0, ClusterJobRequest(mode="auto", knn_k=10, seed=0))
        # union of child scope = parent members
        parent_members = {docs[int(r)].id for r in project.partition.members(0)}
        assert {docs[int(r)].id for r in child.scope_rows} == parent_members
        # child recovers the two sub-groups
        from intentcluster.metrics import purity

        child_truth = [sub_truth[int(r)] for r in child.scope_rows]
        assert child.partition.n_clusters == 2
        assert purity(child.partition, child_truth) == 1.0
        assert project.subpartitions[0] is child

    def test_singleton_cluster_refused(self, blob_project):
        project, docs, _ = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="fixed_k", k=120, seed=0))
        with pytest.raises(ValueError, match="nothing to sub-cluster"):
            project.subcluster(0, ClusterJobRequest(mode="auto"))

    def test_two_doc_cluster_auto(self, blob_project):
        project, docs, _ = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        # force a 2-doc scope through the subcluster path
        scoped = ClusterJobRequest(
            mode="auto", knn_k=1, seed=0, scope=[docs[0].id, docs[1].id]
        )
        result = project.run_cluster_job(scoped)
        assert result.partition.n_clusters <= 2


class TestAdapter:
    def test_threshold_enforced(self, blob_project):
        project, docs, _ = blob_project
        project.label_docs([docs[0].id], "a")
        with pytest.raises(ValueError, match="labeled fraction 0.0083 below threshold 0.0250"):
            project.retrain_adapter(TrainConfig(epochs=1))

    def test_retrain_swaps_embeddings(self, blob_project):
        project, docs, truth = blob_project
        for i in range(0, 120, 20):
            project.label_docs([docs[i].id], truth[i])
        adapter = project.retrain_adapter(TrainConfig(epochs=3, seed=0))
        assert adapter.trained_on == 6
        assert project.adapted_embeddings is not None
        assert project.adapted_embeddings.shape == project.base_embeddings.shape
        # subsequent jobs use the adapted embeddings
        r = project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=0))
        assert r.partition.n_nodes == 120


class TestPersistence:
    def test_round_trip(self, tmp_path, blob_project):
        project, docs, truth = blob_project
        project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=5, seed=3))
        project.bulk_label(0, "alpha")
        for i in range(0, 120, 10):
            project.label_docs([docs[i].id], truth[i])
        project.retrain_adapter(TrainConfig(epochs=2, seed=0))
        project.save(tmp_path / "proj")

        loaded = Project.load(tmp_path / "proj")
        assert loaded.n_docs == 120
        assert loaded.labels == project.labels
        assert loaded.revision == project.revision
        assert np.array_equal(loaded.base_embeddings, project.base_embeddings)
        assert np.array_equal(loaded.adapted_embeddings, project.adapted_embeddings)
        assert np.array_equal(loaded.adapter.W, project.adapter.W)
        assert [r.to_dict() for r in loaded.jobs] == [r.to_dict() for r in project.jobs]

    def test_job_replay_reproduces_digest(self, tmp_path, blob_project):
        project, *_ = blob_project
        result = project.run_cluster_job(ClusterJobRequest(mode="auto", knn_k=6, seed=42))
        project.save(tmp_path / "proj")
        loaded = Project.load(tmp_path / "proj")
        record = loaded.jobs[0]
        replay = loaded.run_cluster_job(ClusterJobRequest(**record.request))
        assert replay.digest == result.digest
        assert np.array_equal(replay.partition.assignment, result.partition.assignment)

from collections import defaultdict

import numpy as np
import pytest

from jcse_kit.contrastive import BatchEmbeddings, TrainConfig, loss_weighted
from jcse_kit.corpus import SentencePair, Triplet
from jcse_kit.encoder import build_vocab, embed, init_params, params_checksum, tokenize
from jcse_kit.errors import EmptyTriplets, NonFiniteLoss, ValidationError
from jcse_kit.trainer import (
    TrainReport,
    build_nli_triplets,
    stage1_config,
    stage2_config,
    train_stage,
    two_stage_train,
)

from conftest import build_group_corpus, build_group_nli_records, group_sentence


def pair(p, h, label):
    return SentencePair(s1=p, s2=h, label=label)


class TestBuildNliTriplets:
    def test_direct_rule(self):
        records = [pair("p1", "h1", "entailment"), pair("p1", "h2", "contradiction")]
        triplets, dropped = build_nli_triplets(records)
        assert triplets == [Triplet(anchor="p1", positive="h1", negative="h2")]
        assert dropped == 0

    def test_entailment_only_dropped(self):
        triplets, dropped = build_nli_triplets([pair("p1", "h1", "entailment")])
        assert triplets == []
        assert dropped == 1

    def test_contradiction_only_dropped(self):
        triplets, dropped = build_nli_triplets([pair("p1", "h1", "contradiction")])
        assert triplets == []
        assert dropped == 1

    def test_two_entailments_share_negative(self):
        records = [
            pair("p1", "e1", "entailment"),
            pair("p1", "e2", "entailment"),
            pair("p1", "c1", "contradiction"),
        ]
        triplets, dropped = build_nli_triplets(records)
        assert triplets == [
            Triplet(anchor="p1", positive="e1", negative="c1"),
            Triplet(anchor="p1", positive="e2", negative="c1"),
        ]
        assert dropped == 0

    def test_neutral_records_ignored(self):
        records = [
            pair("p1", "e1", "entailment"),
            pair("p1", "n1", "neutral"),
            pair("p1", "c1", "contradiction"),
        ]
        triplets, _ = build_nli_triplets(records)
        assert len(triplets) == 1

    def test_self_contradiction_does_not_pair(self):
        records = [pair("p1", "e1", "entailment"), pair("p1", "p1", "contradiction")]
        triplets, dropped = build_nli_triplets(records)
        assert triplets == []
        assert dropped == 1

    def test_unlabeled_record_rejected(self):
        with pytest.raises(ValidationError):
            build_nli_triplets([SentencePair(s1="a", s2="b", score=3.0)])

    def test_hundred_record_fixture_matches_bruteforce(self):
        # deterministic mix of labels across 25 premises, 100 records total
        rng = np.random.default_rng(6)
        records = []
        for i in range(25):
            labels = ["entailment", "contradiction", "neutral"]
            for j in range(4):
                records.append(pair(f"p{i:02d}", f"h{i:02d}-{j}", labels[int(rng.integers(3))]))
        assert len(records) == 100

        entail = defaultdict(list)
        contra = defaultdict(list)
        for r in records:
            if r.label == "entailment":
                entail[r.s1].append(r.s2)
            elif r.label == "contradiction":
                contra[r.s1].append(r.s2)
        want_count = sum(
            len(entail[p]) * len(contra[p]) for p in entail if entail[p] and contra[p]
        )
        want_dropped = sum(
            1 for p in {r.s1 for r in records} if not (entail[p] and contra[p])
        )

        triplets, dropped = build_nli_triplets(records)
        assert len(triplets) == want_count
        assert dropped == want_dropped
        got = {(t.anchor, t.positive, t.negative) for t in triplets}
        want = {
            (p, e, c) for p in entail for e in entail[p] for c in contra[p]
        }
        assert got == want

    def test_group_fixture_counts(self):
        records = build_group_nli_records(6)
        triplets, dropped = build_nli_triplets(records)
        assert len(triplets) == 6 * 2 * 2
        assert dropped == 0


def make_params(corpus, dim=8, seed=0):
    vocab = build_vocab(corpus)
    return vocab, init_params(vocab, dim, seed)


def eval_loss(params, triplets, tau, alpha):
    """Dropout-free full-batch loss, computed outside the trainer."""

    def vec(text):
        return embed(params, tokenize(params.vocab, text))

    batch = BatchEmbeddings(
        anchors=np.stack([vec(t.anchor) for t in triplets]),
        positives=np.stack([vec(t.positive if t.positive is not None else t.anchor) for t in triplets]),
        negatives=np.stack([vec(t.negative) for t in triplets]),
    )
    return loss_weighted(batch, tau, alpha)


@pytest.fixture(scope="module")
def nli_triplets():
    triplets, _ = build_nli_triplets(build_group_nli_records(6))
    return triplets


@pytest.fixture(scope="module")
def fixture_params():
    corpus = build_group_corpus(n_groups=6, sentences_per_group=3)
    _, params = make_params(corpus, dim=8, seed=1)
    return params


class TestTrainStage:
    def test_empty_triplets(self, fixture_params):
        with pytest.raises(EmptyTriplets):
            train_stage(fixture_params, [], TrainConfig())

    def test_report_shape(self, fixture_params, nli_triplets):
        cfg = TrainConfig(epochs=2, batch_size=10, seed=3)
        _, report = train_stage(fixture_params, nli_triplets, cfg)
        assert isinstance(report, TrainReport)
        assert len(report.epoch_losses) == 2
        # 24 triplets in batches of 10: the final partial batch is kept
        assert report.batches_seen == 2 * 3
        assert report.to_dict()["epoch_losses"] == list(report.epoch_losses)

    def test_input_params_not_mutated(self, fixture_params, nli_triplets):
        before = params_checksum(fixture_params)
        train_stage(fixture_params, nli_triplets, TrainConfig(epochs=1, seed=3))
        assert params_checksum(fixture_params) == before

    def test_zero_learning_rate_leaves_params(self, fixture_params, nli_triplets):
        cfg = TrainConfig(learning_rate=0.0, epochs=2, seed=3)
        out, report = train_stage(fixture_params, nli_triplets, cfg)
        assert params_checksum(out) == params_checksum(fixture_params)

    def test_zero_learning_rate_constant_loss_history(self, fixture_params, nli_triplets):
        # with dropout off and a full batch, every epoch sees the same function
        cfg = TrainConfig(
            learning_rate=0.0, epochs=3, batch_size=64, dropout_rate=0.0, seed=3
        )
        _, report = train_stage(fixture_params, nli_triplets, cfg)
        assert len(set(report.epoch_losses)) == 1
        want = eval_loss(fixture_params, nli_triplets, cfg.tau, cfg.alpha)
        assert report.epoch_losses[0] == pytest.approx(want, rel=1e-12)

    def test_one_triplet_alpha_zero_is_noop(self, fixture_params):
        t = Triplet(anchor="t000n000t001n001t002", positive=None, negative="t000n006t001n007t002")
        cfg = TrainConfig(alpha=0.0, epochs=2, seed=5)
        out, report = train_stage(fixture_params, [t], cfg)
        assert report.epoch_losses == (0.0, 0.0)
        assert params_checksum(out) == params_checksum(fixture_params)

    def test_zero_epochs(self, fixture_params, nli_triplets):
        out, report = train_stage(fixture_params, nli_triplets, TrainConfig(epochs=0))
        assert report.epoch_losses == ()
        assert report.batches_seen == 0
        assert params_checksum(out) == params_checksum(fixture_params)

    def test_bit_identical_determinism(self, fixture_params, nli_triplets):
        cfg = TrainConfig(epochs=2, batch_size=8, seed=11)
        out1, rep1 = train_stage(fixture_params, nli_triplets, cfg)
        out2, rep2 = train_stage(fixture_params, nli_triplets, cfg)
        assert rep1 == rep2
        np.testing.assert_array_equal(out1.embeddings, out2.embeddings)
        np.testing.assert_array_equal(out1.projection, out2.projection)
        np.testing.assert_array_equal(out1.bias, out2.bias)

    def test_seed_changes_result(self, fixture_params, nli_triplets):
        cfg_a = TrainConfig(epochs=1, batch_size=8, seed=11)
        cfg_b = TrainConfig(epochs=1, batch_size=8, seed=12)
        _, rep_a = train_stage(fixture_params, nli_triplets, cfg_a)
        _, rep_b = train_stage(fixture_params, nli_triplets, cfg_b)
        assert rep_a.checksum != rep_b.checksum

    def test_checksum_matches_returned_params(self, fixture_params, nli_triplets):
        out, report = train_stage(fixture_params, nli_triplets, TrainConfig(epochs=1, seed=3))
        assert report.checksum == params_checksum(out)

    def test_single_step_descends(self, nli_triplets):
        corpus = build_group_corpus(n_groups=6, sentences_per_group=3)
        vocab = build_vocab(corpus)
        failures = 0
        for seed in range(10):
            params = init_params(vocab, 8, seed)
            cfg = TrainConfig(
                tau=0.05,
                alpha=1.0,
                batch_size=len(nli_triplets),
                learning_rate=0.01,
                epochs=1,
                seed=seed,
                dropout_rate=0.0,
            )
            before = eval_loss(params, nli_triplets, cfg.tau, cfg.alpha)
            after_params, report = train_stage(params, nli_triplets, cfg)
            assert report.epoch_losses[0] == pytest.approx(before, rel=1e-12)
            after = eval_loss(after_params, nli_triplets, cfg.tau, cfg.alpha)
            if after > before:
                failures += 1
        assert failures <= 1

    def test_nonfinite_loss_aborts(self, fixture_params, nli_triplets, monkeypatch):
        monkeypatch.setattr("jcse_kit.trainer.loss_weighted", lambda *a, **k: float("nan"))
        with pytest.raises(NonFiniteLoss) as exc:
            train_stage(fixture_params, nli_triplets, TrainConfig(epochs=1, seed=3))
        assert exc.value.epoch == 0
        assert exc.value.batch == 0


class TestStageConfigs:
    def test_stage_defaults(self):
        assert stage1_config().tau == 0.05
        assert stage1_config().alpha == 0.0
        assert stage2_config().tau == 0.05
        assert stage2_config().alpha == 1.0

    def test_overrides(self):
        cfg = stage1_config(epochs=2, seed=9)
        assert cfg.epochs == 2
        assert cfg.seed == 9
        assert cfg.alpha == 0.0


@pytest.fixture(scope="module")
def stage_triplets():
    synth = []
    for g in range(6):
        base = g * 6
        anchor = group_sentence(f"a{g}", 0, [f"n{base:03d}", f"n{base + 1:03d}"]).text
        negative = group_sentence(f"x{g}", 0, [f"n{base + 2:03d}", f"n{base + 3:03d}"]).text
        synth.append(Triplet(anchor=anchor, positive=None, negative=negative))
    nli, _ = build_nli_triplets(build_group_nli_records(6))
    return synth, nli


class TestTwoStageTrain:
    def test_runs_both_stages(self, fixture_params, stage_triplets):
        synth, nli = stage_triplets
        cfg1 = stage1_config(epochs=1, seed=2)
        cfg2 = stage2_config(epochs=2, seed=3)
        final, rep1, rep2 = two_stage_train(fixture_params, synth, nli, cfg1, cfg2)
        assert len(rep1.epoch_losses) == 1
        assert len(rep2.epoch_losses) == 2
        assert rep2.checksum == params_checksum(final)
        assert rep1.checksum != rep2.checksum

    def test_stage_order_matters(self, fixture_params, stage_triplets):
        synth, nli = stage_triplets
        cfg1 = stage1_config(epochs=1, seed=2)
        cfg2 = stage2_config(epochs=1, seed=3)
        fwd, _, _ = two_stage_train(fixture_params, synth, nli, cfg1, cfg2)
        rev, _, _ = two_stage_train(fixture_params, nli, synth, cfg1, cfg2)
        assert params_checksum(fwd) != params_checksum(rev)

    def test_zero_epoch_stage_one_equals_stage_two_alone(self, fixture_params, stage_triplets):
        synth, nli = stage_triplets
        cfg1 = stage1_config(epochs=0)
        cfg2 = stage2_config(epochs=2, seed=7)
        final, rep1, rep2 = two_stage_train(fixture_params, synth, nli, cfg1, cfg2)
        direct, direct_rep = train_stage(fixture_params, nli, cfg2)
        assert rep1.epoch_losses == ()
        assert params_checksum(final) == params_checksum(direct)
        assert rep2.epoch_losses == direct_rep.epoch_losses

    def test_empty_stage_propagates(self, fixture_params, stage_triplets):
        synth, nli = stage_triplets
        with pytest.raises(EmptyTriplets):
            two_stage_train(fixture_params, [], nli)
        with pytest.raises(EmptyTriplets):
            two_stage_train(fixture_params, synth, [])

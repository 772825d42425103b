"""Tests for the learned reconstruction architectures and their training."""

import numpy as np
import pytest

from patkit.config.forward import ForwardConfig
from patkit.config.train import Architecture, NetworkConfig, TrainConfig
from patkit.core.rng import RngStream, normal_draws
from patkit.core.types import SensorData
from patkit.exceptions import ConfigError, DimensionError, FormatError, GeometryError, SizeError, TrainingError
from patkit.forward.matrix import apply_forward
from patkit.learned import (
    Domain,
    PairSet,
    TrainLog,
    build_recon_net,
    load_recon_net,
    reconstruct,
    save_recon_net,
    train_greedy,
    train_supervised,
)
from patkit.nn import forward_pass
from patkit.nn.checkpoint import save_checkpoint
from patkit.nn.losses import mse_loss


def training_pairs(A, n: int = 6, seed: int = 5) -> PairSet:
    f = RngStream(seed).uniform(n * A.m * A.m).reshape(n, A.m, A.m)
    g = A.forward_batch(f.reshape(n, -1)).reshape((n,) + A.data_shape)
    return PairSet(g, f, A.fingerprint)


def perturb(net, seed: int = 7, scale: float = 0.1) -> None:
    """Move every parameter away from its identity initialisation."""
    rng = RngStream(seed)
    for name in net.params.names():
        tensor = net.params[name]
        net.params.set(name, tensor + rng.uniform(tensor.size, -scale, scale).reshape(tensor.shape))


def blob_pairs(A, n: int, seed: int = 8) -> PairSet:
    """Smooth targets: one Gaussian blob per image at a random position."""
    centres = RngStream(seed).uniform(2 * n, 2.0, A.m - 2.0).reshape(n, 2, 1, 1)
    rows, cols = np.mgrid[0:A.m, 0:A.m]
    f = np.exp(-((rows - centres[:, 0]) ** 2 + (cols - centres[:, 1]) ** 2) / (2 * 1.5 ** 2))
    g = A.forward_batch(f.reshape(n, -1)).reshape((n,) + A.data_shape)
    return PairSet(g, f, A.fingerprint)


def block_losses(net, pairs: PairSet) -> list[float]:
    """Training loss of A^T g and of the iterate after each block."""
    f = net.initial(pairs.inputs)
    losses = [mse_loss(f, pairs.targets)[0]]
    for n in range(net.n_iter):
        f, _ = net.step(n, f, pairs.inputs)
        losses.append(mse_loss(f, pairs.targets)[0])
    return losses


def check_net_gradients(net, x, y, names: list[str], eps: float = 1e-6) -> None:
    state = net.forward(x)
    _, grad_out = mse_loss(state.output, y)
    grads = net.backward(state, grad_out)
    rng = RngStream(17)
    for name in names:
        array = net.params[name]
        for flat in rng.integers(3, 0, array.size):
            index = np.unravel_index(flat, array.shape)
            original = array[index]
            array[index] = original + eps
            up = mse_loss(net.forward(x).output, y)[0]
            array[index] = original - eps
            down = mse_loss(net.forward(x).output, y)[0]
            array[index] = original
            assert grads[name][index] == pytest.approx((up - down) / (2 * eps), rel=1e-4, abs=1e-6)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


class TestBuild:
    def test_learned_gd_parameter_count(self, tiny_matrix):
        net = build_recon_net("lgd", NetworkConfig(n_iter=5), tiny_matrix.config, tiny_matrix)
        assert net.param_count() == 5 * 19392
        assert net.params.count() == net.param_count()
        assert net.params["block0.conv1.weight"].shape == (32, 2, 3, 3)

    def test_learned_pd_channels(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lpd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        assert net.params["dual0.conv1.weight"].shape == (4, 3, 3, 3)
        assert net.params["primal1.conv1.weight"].shape == (4, 2, 3, 3)
        assert net.n_iter == 2

    def test_fully_learned_parameter_count(self, tiny_cfg):
        cfg = NetworkConfig(channels=4)
        net = build_recon_net("fl", cfg, tiny_cfg)
        T, M, C = tiny_cfg.n_samples, tiny_cfg.n_pixels, 4
        dense = (T * 2 * M + 2 * M) + (2 * M * M + M) + (M * M + M)
        convs = (9 * C + C) + 2 * (9 * C * C + C) + (9 * C + 1)
        assert net.param_count() == dense + convs

    def test_fully_learned_memory_cap(self, tiny_cfg):
        with pytest.raises(SizeError):
            build_recon_net("fl", NetworkConfig(memory_cap_bytes=1000), tiny_cfg)

    def test_unet_needs_two_halvings(self, small_net_cfg):
        with pytest.raises(ConfigError):
            build_recon_net("unet", small_net_cfg, ForwardConfig(m=10, n_t=30))

    def test_model_based_need_matrix(self, tiny_cfg, small_net_cfg):
        with pytest.raises(ConfigError):
            build_recon_net(Architecture.LearnedGD, small_net_cfg, tiny_cfg)

    def test_matrix_geometry_checked(self, small_cfg, tiny_matrix, small_net_cfg):
        with pytest.raises(GeometryError):
            build_recon_net("lgd", small_net_cfg, small_cfg, tiny_matrix)

    def test_same_seed_same_weights(self, tiny_matrix, small_net_cfg):
        a = build_recon_net("lpd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        b = build_recon_net("lpd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        for name in a.params:
            np.testing.assert_array_equal(a.params[name], b.params[name])


# ---------------------------------------------------------------------------
# Untrained behaviour
# ---------------------------------------------------------------------------


class TestIdentityStart:
    def test_unet_returns_initial_image(self, tiny_cfg, small_net_cfg):
        net = build_recon_net("unet", small_net_cfg, tiny_cfg)
        f0 = RngStream(1).uniform(128).reshape(2, 8, 8)
        np.testing.assert_array_equal(net.predict(f0), f0)

    @pytest.mark.parametrize("arch", ["lgd", "lpd", "pre"])
    def test_model_based_return_adjoint(self, arch, tiny_matrix, small_net_cfg):
        net = build_recon_net(arch, small_net_cfg, tiny_matrix.config, tiny_matrix)
        pairs = training_pairs(tiny_matrix, n=2)
        expected = tiny_matrix.adjoint_batch(pairs.inputs.reshape(2, -1)).reshape(2, 8, 8)
        np.testing.assert_allclose(net.predict(pairs.inputs), expected, rtol=1e-12, atol=1e-12)

    def test_data_domain_preprocessing(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("pre", small_net_cfg, tiny_matrix.config, tiny_matrix, output_domain=Domain.Data)
        pairs = training_pairs(tiny_matrix, n=1)
        np.testing.assert_array_equal(net.predict(pairs.inputs), pairs.inputs)
        image = reconstruct(net, pairs.inputs[0])
        np.testing.assert_allclose(image.data.ravel(), pairs.inputs[0].ravel() @ tiny_matrix.entries)

    def test_fully_learned_output_non_negative(self, tiny_cfg):
        net = build_recon_net("fl", NetworkConfig(channels=4), tiny_cfg)
        perturb(net, scale=0.5)
        out = net.predict(RngStream(2).uniform(2 * 192, -1, 1).reshape(2, 8, 24))
        assert out.shape == (2, 8, 8)
        assert out.min() >= 0.0


class TestLearnedGradientDescent:
    def test_reproduces_gradient_descent(self, tiny_matrix):
        cfg = NetworkConfig(n_iter=3, channels=4)
        net = build_recon_net("lgd", cfg, tiny_matrix.config, tiny_matrix)
        eta = 1.0 / np.linalg.norm(tiny_matrix.entries, 2) ** 2
        centre = (slice(None), slice(None), 1, 1)
        for n in range(3):
            conv1 = np.zeros((4, 2, 3, 3))
            conv1[0, 1, 1, 1] = 1.0
            conv1[1, 1, 1, 1] = -1.0
            identity = np.zeros((4, 4, 3, 3))
            identity[centre] = np.eye(4)
            out = np.zeros((1, 4, 3, 3))
            out[0, 0, 1, 1] = -eta
            out[0, 1, 1, 1] = eta
            net.params.set(f"block{n}.conv1.weight", conv1)
            net.params.set(f"block{n}.conv2.weight", identity)
            net.params.set(f"block{n}.conv3.weight", identity)
            net.params.set(f"block{n}.out.weight", out)

        g = training_pairs(tiny_matrix, n=1).inputs
        A = tiny_matrix.entries
        f = A.T @ g[0].ravel()
        for _ in range(3):
            f = f - eta * A.T @ (A @ f - g[0].ravel())
        np.testing.assert_allclose(net.predict(g)[0].ravel(), f, rtol=1e-10, atol=1e-10)


class TestLearnedPrimalDual:
    def test_single_iteration_composes_blocks(self, tiny_matrix):
        net = build_recon_net("lpd", NetworkConfig(n_iter=1, channels=4, seed=3), tiny_matrix.config, tiny_matrix)
        perturb(net, scale=0.05)
        g = training_pairs(tiny_matrix, n=2).inputs
        A = tiny_matrix.entries
        f0 = (g.reshape(2, -1) @ A).reshape(2, 8, 8)
        Af = (f0.reshape(2, -1) @ A.T).reshape(g.shape)
        dh, _ = forward_pass(net.duals[0], np.stack([np.zeros_like(g), Af, g], axis=1))
        ATh = (dh[:, 0].reshape(2, -1) @ A).reshape(f0.shape)
        df, _ = forward_pass(net.primals[0], np.stack([f0, ATh], axis=1))
        np.testing.assert_allclose(net.predict(g), f0 + df[:, 0], rtol=1e-10, atol=1e-12)

    def test_silent_dual_leaves_primal_only(self, tiny_matrix):
        net = build_recon_net("lpd", NetworkConfig(n_iter=1, channels=4, seed=3), tiny_matrix.config, tiny_matrix)
        perturb(net, scale=0.05)
        g = training_pairs(tiny_matrix, n=2).inputs
        with_dual = net.predict(g)
        net.params.set("dual0.out.weight", np.zeros_like(net.params["dual0.out.weight"]))
        f0 = (g.reshape(2, -1) @ tiny_matrix.entries).reshape(2, 8, 8)
        df, _ = forward_pass(net.primals[0], np.stack([f0, np.zeros_like(f0)], axis=1))
        without_dual = net.predict(g)
        np.testing.assert_allclose(without_dual, f0 + df[:, 0], rtol=1e-10, atol=1e-12)
        assert not np.allclose(with_dual, without_dual)


# ---------------------------------------------------------------------------
# Gradients through the unrolled operators
# ---------------------------------------------------------------------------


class TestBackward:
    @pytest.mark.parametrize("arch,names", [
        ("lgd", ["block0.conv1.weight", "block0.out.weight", "block1.conv2.bias", "block1.out.weight"]),
        ("lpd", ["dual0.conv1.weight", "primal0.out.weight", "dual1.out.weight", "primal1.conv3.bias"]),
        ("pre", ["pre.conv1.weight", "pre.out.weight"]),
    ])
    def test_model_based(self, arch, names, tiny_matrix, small_net_cfg):
        net = build_recon_net(arch, small_net_cfg, tiny_matrix.config, tiny_matrix)
        perturb(net, scale=0.05)
        pairs = training_pairs(tiny_matrix, n=2)
        check_net_gradients(net, pairs.inputs, pairs.targets, names)

    def test_unet(self, tiny_cfg, small_net_cfg):
        net = build_recon_net("unet", small_net_cfg, tiny_cfg)
        perturb(net)
        rng = RngStream(3)
        x = rng.uniform(128).reshape(2, 8, 8)
        y = rng.uniform(128).reshape(2, 8, 8)
        check_net_gradients(net, x, y, ["unet.enc1a.weight", "unet.mid_b.bias", "unet.up1.weight", "unet.out.weight"])

    def test_fully_learned(self, tiny_cfg):
        net = build_recon_net("fl", NetworkConfig(channels=4), tiny_cfg)
        perturb(net, scale=0.2)
        rng = RngStream(3)
        x = rng.uniform(2 * 192, -1, 1).reshape(2, 8, 24)
        y = rng.uniform(128).reshape(2, 8, 8)
        check_net_gradients(net, x, y, ["fl.dense1.weight", "fl.dense3.bias", "fl.conv2.weight"])


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class TestReconstruct:
    def test_foreign_geometry(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        g = SensorData(np.zeros(tiny_matrix.data_shape), 0.5, np.zeros((8, 2)), fingerprint="f" * 16)
        with pytest.raises(GeometryError):
            reconstruct(net, g)

    def test_wrong_shape(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        with pytest.raises(DimensionError):
            reconstruct(net, np.zeros((8, 20)))
        with pytest.raises(DimensionError):
            net.predict(np.zeros((8, 24)))

    def test_single_sample_matches_batch(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        perturb(net)
        pairs = training_pairs(tiny_matrix, n=3)
        g = apply_forward(tiny_matrix, pairs.targets[1])
        np.testing.assert_allclose(reconstruct(net, g).data, net.predict(pairs.inputs)[1], rtol=1e-10, atol=1e-12)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


class TestTraining:
    def test_identity_pairs_have_zero_loss(self, tiny_cfg, small_net_cfg):
        net = build_recon_net("unet", small_net_cfg, tiny_cfg)
        f = RngStream(1).uniform(4 * 64).reshape(4, 8, 8)
        log = TrainLog()
        train_supervised(net, PairSet(f, f), TrainConfig(n_steps=3, batch_size=2, log_every=1), log=log)
        assert log.column('train_loss').iloc[0] == 0.0

    def test_same_seed_same_run(self, tiny_matrix, small_net_cfg):
        tcfg = TrainConfig(n_steps=3, batch_size=2, log_every=1, learning_rate=1e-3)
        runs = []
        for _ in range(2):
            net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
            log = TrainLog()
            train_supervised(net, training_pairs(tiny_matrix), tcfg, log=log)
            runs.append((net, log.to_frame()))
        (a, log_a), (b, log_b) = runs
        assert log_a.equals(log_b)
        for name in a.params:
            np.testing.assert_array_equal(a.params[name], b.params[name])

    def test_training_reduces_loss(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        pairs = training_pairs(tiny_matrix)
        before = mse_loss(net.predict(pairs.inputs), pairs.targets)[0]
        train_supervised(net, pairs, TrainConfig(n_steps=30, batch_size=3, learning_rate=1e-4))
        assert mse_loss(net.predict(pairs.inputs), pairs.targets)[0] < before

    def test_validation_schedule(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        log = TrainLog()
        tcfg = TrainConfig(n_steps=4, batch_size=2, val_every=2, log_every=1)
        train_supervised(net, training_pairs(tiny_matrix), tcfg, training_pairs(tiny_matrix, 2, seed=9), log)
        assert list(log.column('val_loss').index) == [0, 2, 4]
        assert list(log.column('train_loss').index) == [0, 1, 2, 3]
        assert log.column('val_psnr').notna().all()

    def test_empty_training_set(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        with pytest.raises(TrainingError):
            train_supervised(net, PairSet(np.zeros((0, 8, 24)), np.zeros((0, 8, 8))), TrainConfig(n_steps=1))

    def test_non_finite_loss(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        pairs = training_pairs(tiny_matrix, n=2)
        bad = PairSet(pairs.inputs, np.full_like(pairs.targets, np.nan))
        with pytest.raises(TrainingError) as info:
            train_supervised(net, bad, TrainConfig(n_steps=2, batch_size=1))
        assert info.value.step == 0

    def test_non_finite_validation_keeps_final_parameters(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        pairs = training_pairs(tiny_matrix, n=3)
        val = PairSet(pairs.inputs, np.full_like(pairs.targets, np.nan), pairs.fingerprint)
        initial = net.params.state()
        tcfg = TrainConfig(n_steps=4, batch_size=2, val_every=2, learning_rate=1e-3)
        params = train_supervised(net, pairs, tcfg, val)
        assert params is net.params
        assert any(not np.array_equal(initial[name], params[name]) for name in params)
        assert all(np.isfinite(params[name]).all() for name in params)

    def test_foreign_pairs(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        pairs = training_pairs(tiny_matrix, n=2)
        with pytest.raises(GeometryError):
            train_supervised(net, PairSet(pairs.inputs, pairs.targets, "0" * 16), TrainConfig(n_steps=1))

    def test_log_saved_as_csv(self, tmp_path):
        log = TrainLog()
        log.record(0, train_loss=1.5)
        log.record(0, val_loss=2.0)
        log.record(1, train_loss=1.0)
        log.save(tmp_path / 'loss.csv')
        header = (tmp_path / 'loss.csv').read_text().splitlines()[0]
        assert header == "step,train_loss,val_loss,val_psnr,val_ssim"
        assert len(log) == 2

    @pytest.mark.slow
    def test_preprocessing_denoises_data(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("pre", small_net_cfg, tiny_matrix.config, tiny_matrix, output_domain=Domain.Data)
        clean = blob_pairs(tiny_matrix, 30).inputs
        sigma = 3.0 * float(np.std(clean))
        noisy = clean + normal_draws(RngStream(11), clean.size, sigma).reshape(clean.shape)
        train, test = slice(0, 24), slice(24, 30)
        tcfg = TrainConfig(n_steps=500, batch_size=4, learning_rate=3e-3)
        train_supervised(net, PairSet(noisy[train], clean[train], tiny_matrix.fingerprint), tcfg)
        before = mse_loss(noisy[test], clean[test])[0]
        after = mse_loss(net.predict(noisy[test]), clean[test])[0]
        assert after <= 0.5 * before

    @pytest.mark.slow
    def test_postprocessing_improves_initial_image(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("unet", small_net_cfg, tiny_matrix.config)
        pairs = blob_pairs(tiny_matrix, 30)
        f0 = tiny_matrix.adjoint_batch(pairs.inputs.reshape(30, -1)).reshape(30, 8, 8)
        train = PairSet(f0[:24], pairs.targets[:24], tiny_matrix.fingerprint)
        val = PairSet(f0[24:], pairs.targets[24:], tiny_matrix.fingerprint)
        log = TrainLog()
        tcfg = TrainConfig(n_steps=300, batch_size=4, val_every=100, learning_rate=1e-3)
        train_supervised(net, train, tcfg, val, log)
        val_psnr = log.column('val_psnr')
        assert val_psnr.max() >= val_psnr.iloc[0] + 3.0


class TestGreedyTraining:
    def test_single_block_matches_end_to_end(self, tiny_matrix):
        cfg = NetworkConfig(n_iter=1, channels=4, seed=2)
        tcfg = TrainConfig(n_steps=3, batch_size=2, learning_rate=1e-3)
        pairs = training_pairs(tiny_matrix)
        end_to_end = build_recon_net("lgd", cfg, tiny_matrix.config, tiny_matrix)
        greedy = build_recon_net("lgd", cfg, tiny_matrix.config, tiny_matrix)
        train_supervised(end_to_end, pairs, tcfg)
        train_greedy(greedy, pairs, tcfg)
        for name in greedy.params:
            np.testing.assert_allclose(greedy.params[name], end_to_end.params[name], rtol=1e-6, atol=1e-12)

    def test_blocks_trained_in_turn(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        log = TrainLog()
        tcfg = TrainConfig(n_steps=4, batch_size=2, log_every=1, learning_rate=1e-3)
        train_greedy(net, training_pairs(tiny_matrix), tcfg, training_pairs(tiny_matrix, 2, seed=9), log)
        assert list(log.column('val_loss').index) == [2, 4]
        assert np.any(net.params["block0.out.weight"] != 0)
        assert np.any(net.params["block1.out.weight"] != 0)

    def test_only_learned_gd(self, tiny_cfg, small_net_cfg):
        net = build_recon_net("unet", small_net_cfg, tiny_cfg)
        f = np.zeros((2, 8, 8))
        with pytest.raises(ConfigError):
            train_greedy(net, PairSet(f, f), TrainConfig(n_steps=2))

    def test_each_block_lowers_training_loss(self, tiny_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        pairs = blob_pairs(tiny_matrix, 8)
        train_greedy(net, pairs, TrainConfig(n_steps=200, batch_size=4, learning_rate=1e-3))
        losses = block_losses(net, pairs)
        assert all(b <= a * (1 + 1e-6) for a, b in zip(losses, losses[1:]))
        assert losses[-1] < losses[0]

    def test_end_to_end_at_least_as_good(self, tiny_matrix, small_net_cfg):
        pairs = blob_pairs(tiny_matrix, 8)
        tcfg = TrainConfig(n_steps=200, batch_size=4, learning_rate=1e-3)
        greedy = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        end_to_end = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        train_greedy(greedy, pairs, tcfg)
        train_supervised(end_to_end, pairs, tcfg)
        assert block_losses(greedy, pairs)[-1] >= mse_loss(end_to_end.predict(pairs.inputs), pairs.targets)[0]


# ---------------------------------------------------------------------------
# Storage
# ---------------------------------------------------------------------------


class TestStorage:
    def test_round_trip(self, tmp_path, tiny_matrix, small_net_cfg):
        net = build_recon_net("lpd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        perturb(net)
        save_recon_net(tmp_path / 'lpd.patc', net)
        loaded = load_recon_net(tmp_path / 'lpd.patc', tiny_matrix)
        assert loaded.arch == Architecture.LearnedPD
        x = training_pairs(tiny_matrix, n=2).inputs
        np.testing.assert_array_equal(loaded.predict(x), net.predict(x))

    def test_data_domain_restored(self, tmp_path, tiny_matrix, small_net_cfg):
        net = build_recon_net("pre", small_net_cfg, tiny_matrix.config, tiny_matrix, output_domain=Domain.Data)
        save_recon_net(tmp_path / 'pre.patc', net)
        assert load_recon_net(tmp_path / 'pre.patc', tiny_matrix).output_domain == Domain.Data

    def test_other_geometry_rejected(self, tmp_path, tiny_matrix, small_matrix, small_net_cfg):
        net = build_recon_net("lgd", small_net_cfg, tiny_matrix.config, tiny_matrix)
        save_recon_net(tmp_path / 'lgd.patc', net)
        with pytest.raises(GeometryError):
            load_recon_net(tmp_path / 'lgd.patc', small_matrix)

    def test_missing_descriptor_entry(self, tmp_path, tiny_cfg, small_net_cfg):
        net = build_recon_net("unet", small_net_cfg, tiny_cfg)
        save_checkpoint(tmp_path / 'bare.patc', net.params, {'architecture': 'unet'})
        with pytest.raises(FormatError):
            load_recon_net(tmp_path / 'bare.patc')

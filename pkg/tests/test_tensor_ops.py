"""Finite-difference checks and exact-value oracles for every tensor op."""

import numpy as np
import pytest

from blid.errors import NonFiniteValue, ShapeError
from blid.nn import (
    Attention,
    BatchNorm,
    BiLstm,
    Conv1dLayer,
    Dense,
    Embedding,
    Lstm,
    LstmCell,
    Parameter,
    Tensor,
    add,
    batch_norm_infer,
    batch_norm_train,
    concat,
    conv1d,
    cross_entropy,
    dropout,
    embedding_lookup,
    grad_check,
    leaky_relu,
    matmul,
    max_pool_over_time,
    mul,
    narrow,
    relu,
    reshape,
    sigmoid,
    softmax,
    tanh,
)

F64_TOL = 1e-5
F32_TOL = 1e-3
SEEDS = range(20)


def _param(rng, *shape, dtype=np.float64):
    return Parameter(rng.standard_normal(shape).astype(dtype))


def _sum_all(x: Tensor) -> Tensor:
    flat = reshape(x, (1, int(np.prod(x.data.shape))))
    ones = Tensor(np.ones((flat.data.shape[1], 1), dtype=flat.data.dtype))
    return matmul(flat, ones)


class TestElementwiseGradients:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_binary_and_activation_ops(self, seed):
        rng = np.random.default_rng(seed)
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(1, 6))
        a = _param(rng, rows, cols)
        b = _param(rng, rows, cols)

        cases = {
            "add": lambda: _sum_all(tanh(add(a, b))),
            "mul": lambda: _sum_all(tanh(mul(a, b))),
            "sigmoid": lambda: _sum_all(sigmoid(a)),
            "tanh": lambda: _sum_all(tanh(a)),
            "leaky_relu": lambda: _sum_all(sigmoid(leaky_relu(a, alpha=0.01))),
            "softmax": lambda: _sum_all(mul(softmax(a, axis=1), b)),
        }
        for name, fn in cases.items():
            assert grad_check(fn, [a, b]) <= F64_TOL, name

    @pytest.mark.parametrize("seed", SEEDS)
    def test_broadcast_add_bias(self, seed):
        rng = np.random.default_rng(seed)
        x = _param(rng, 3, 4)
        bias = _param(rng, 4)
        fn = lambda: _sum_all(tanh(add(x, bias)))
        assert grad_check(fn, [x, bias]) <= F64_TOL

    def test_relu_gradient_away_from_kink(self):
        rng = np.random.default_rng(7)
        x = Parameter(rng.uniform(0.5, 2.0, size=(3, 3)) * rng.choice([-1, 1], size=(3, 3)))
        fn = lambda: _sum_all(relu(x))
        assert grad_check(fn, [x]) <= F64_TOL


class TestMatmulAndShapes:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_matmul_gradients(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        k = int(rng.integers(1, 5))
        m = int(rng.integers(1, 5))
        a = _param(rng, n, k)
        b = _param(rng, k, m)
        fn = lambda: _sum_all(tanh(matmul(a, b)))
        assert grad_check(fn, [a, b]) <= F64_TOL

    def test_matmul_shape_mismatch(self):
        with pytest.raises(ShapeError):
            matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((4, 2))))

    @pytest.mark.parametrize("seed", SEEDS[:10])
    def test_concat_narrow_reshape(self, seed):
        rng = np.random.default_rng(seed)
        a = _param(rng, 2, 3)
        b = _param(rng, 2, 2)

        def fn():
            joined = concat([a, b], axis=1)  # (2, 5)
            part = narrow(joined, 1, 1, 3)
            return _sum_all(tanh(reshape(part, (3, 2))))

        assert grad_check(fn, [a, b]) <= F64_TOL


class TestLookupAndConv:
    @pytest.mark.parametrize("seed", SEEDS[:10])
    def test_embedding_lookup(self, seed):
        rng = np.random.default_rng(seed)
        table = _param(rng, 7, 4)
        idx = rng.integers(0, 7, size=(3, 5))
        fn = lambda: _sum_all(tanh(embedding_lookup(table, idx)))
        assert grad_check(fn, [table]) <= F64_TOL

    def test_embedding_lookup_range_check(self):
        table = Parameter(np.zeros((3, 2)))
        with pytest.raises(ShapeError):
            embedding_lookup(table, np.array([[0, 3]]))

    @pytest.mark.parametrize("padding", ["valid", "same"])
    @pytest.mark.parametrize("seed", SEEDS[:10])
    def test_conv1d_gradients(self, padding, seed):
        rng = np.random.default_rng(seed)
        x = _param(rng, 2, 6, 3)
        w = _param(rng, 3, 3, 4)
        b = _param(rng, 4)
        fn = lambda: _sum_all(tanh(conv1d(x, w, b, padding=padding)))
        assert grad_check(fn, [x, w, b]) <= F64_TOL

    def test_conv1d_output_lengths(self):
        x = Tensor(np.zeros((1, 6, 2)))
        w = Tensor(np.zeros((3, 2, 5)))
        assert conv1d(x, w, padding="valid").data.shape == (1, 4, 5)
        assert conv1d(x, w, padding="same").data.shape == (1, 6, 5)

    @pytest.mark.parametrize("seed", SEEDS[:10])
    def test_max_pool_over_time(self, seed):
        rng = np.random.default_rng(seed)
        x = _param(rng, 2, 5, 3)
        fn = lambda: _sum_all(tanh(max_pool_over_time(x)))
        assert grad_check(fn, [x]) <= F64_TOL

    def test_max_pool_tie_sends_gradient_to_first_max(self):
        x = Parameter(np.array([[[1.0], [1.0], [0.0]]]))
        out = max_pool_over_time(x)
        out.backward()
        np.testing.assert_array_equal(x.grad, [[[1.0], [0.0], [0.0]]])


class TestNormalizationAndDropout:
    @pytest.mark.parametrize("seed", SEEDS[:10])
    def test_batch_norm_train_gradients(self, seed):
        rng = np.random.default_rng(seed)
        x = _param(rng, 6, 4)
        gamma = Parameter(rng.uniform(0.5, 1.5, size=4))
        beta = _param(rng, 4)

        def fn():
            out, _mean, _var = batch_norm_train(x, gamma, beta)
            return _sum_all(tanh(out))

        assert grad_check(fn, [x, gamma, beta]) <= F64_TOL

    def test_batch_norm_train_normalizes(self):
        rng = np.random.default_rng(3)
        x = Tensor(rng.standard_normal((50, 4)) * 5 + 2)
        out, mean, var = batch_norm_train(
            x, Parameter(np.ones(4)), Parameter(np.zeros(4))
        )
        np.testing.assert_allclose(out.data.mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(out.data.std(axis=0), 1.0, atol=1e-3)
        np.testing.assert_allclose(mean, x.data.mean(axis=0))

    @pytest.mark.parametrize("seed", SEEDS[:10])
    def test_batch_norm_infer_gradients(self, seed):
        rng = np.random.default_rng(seed)
        x = _param(rng, 3, 4)
        gamma = Parameter(rng.uniform(0.5, 1.5, size=4))
        beta = _param(rng, 4)
        mean = rng.standard_normal(4)
        var = rng.uniform(0.5, 2.0, size=4)
        fn = lambda: _sum_all(tanh(batch_norm_infer(x, gamma, beta, mean, var)))
        assert grad_check(fn, [x, gamma, beta]) <= F64_TOL

    def test_dropout_inference_is_identity(self):
        x = Tensor(np.ones((4, 4)))
        out = dropout(x, 0.5, np.random.default_rng(0), training=False)
        assert out is x

    def test_dropout_train_scales_survivors(self):
        rng = np.random.default_rng(0)
        x = Tensor(np.ones((200, 200)))
        out = dropout(x, 0.25, rng, training=True)
        values = set(np.unique(out.data).tolist())
        assert values == {0.0, 1.0 / 0.75}
        assert abs((out.data == 0).mean() - 0.25) < 0.01


class TestSoftmaxCrossEntropy:
    def test_uniform_logits_give_uniform_probs(self):
        probs = softmax(Tensor(np.zeros((1, 3))), axis=1)
        np.testing.assert_allclose(probs.data, [[1 / 3, 1 / 3, 1 / 3]], atol=1e-12)

    def test_fused_gradient_matches_probs_minus_onehot(self):
        x = Parameter(np.zeros((1, 3)))
        onehot = np.array([[1.0, 0.0, 0.0]])
        loss = cross_entropy(softmax(x, axis=1), onehot)
        np.testing.assert_allclose(loss.item(), np.log(3.0), atol=1e-12)
        loss.backward()
        np.testing.assert_allclose(x.grad, [[-2 / 3, 1 / 3, 1 / 3]], atol=1e-12)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_cross_entropy_gradients(self, seed):
        rng = np.random.default_rng(seed)
        x = _param(rng, 4, 3)
        onehot = np.eye(3)[rng.integers(0, 3, size=4)]
        fn = lambda: cross_entropy(softmax(x, axis=1), onehot)
        assert grad_check(fn, [x]) <= F64_TOL

    def test_probabilities_rows_sum_to_one(self):
        rng = np.random.default_rng(5)
        x = Tensor(rng.standard_normal((10, 3)) * 20)
        probs = softmax(x, axis=1).data
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-6)
        assert (probs >= 0).all()

    def test_softmax_stable_for_huge_logits(self):
        x = Tensor(np.array([[1000.0, 0.0, -1000.0]]))
        probs = softmax(x, axis=1).data
        assert np.isfinite(probs).all()
        np.testing.assert_allclose(probs[0, 0], 1.0, atol=1e-12)


class TestRecurrentLayers:
    @pytest.mark.parametrize("seed", SEEDS[:10])
    def test_lstm_step_gradients(self, seed):
        rng = np.random.default_rng(seed)
        cell = LstmCell(3, 4, rng, dtype=np.float64)
        x = _param(rng, 2, 3)
        h = _param(rng, 2, 4)
        c = _param(rng, 2, 4)

        def fn():
            h_next, c_next = cell.step(x, h, c)
            return _sum_all(add(h_next, c_next))

        assert grad_check(fn, [x, h, c] + cell.params()) <= F64_TOL

    def test_zero_weight_lstm_keeps_state_at_zero(self):
        rng = np.random.default_rng(0)
        cell = LstmCell(2, 3, rng, dtype=np.float64)
        for p in cell.params():
            p.data[:] = 0.0
        h, c = cell.step(
            Tensor(np.ones((1, 2))), Tensor(np.zeros((1, 3))), Tensor(np.zeros((1, 3)))
        )
        np.testing.assert_allclose(h.data, 0.0, atol=1e-15)

    @pytest.mark.parametrize("seed", SEEDS[:6])
    def test_lstm_sequence_gradients(self, seed):
        rng = np.random.default_rng(seed)
        cell = LstmCell(3, 4, rng, dtype=np.float64)
        steps = [_param(rng, 2, 3) for _ in range(4)]
        lstm = Lstm(cell)
        fn = lambda: _sum_all(lstm.run(steps)[-1])
        assert grad_check(fn, steps + cell.params()) <= F64_TOL

    @pytest.mark.parametrize("seed", SEEDS[:6])
    def test_bilstm_gradients_and_alignment(self, seed):
        rng = np.random.default_rng(seed)
        fwd = LstmCell(3, 4, rng, dtype=np.float64)
        bwd = LstmCell(3, 4, rng, dtype=np.float64)
        bi = BiLstm(fwd, bwd)
        steps = [_param(rng, 2, 3) for _ in range(3)]

        outs = bi.run(steps)
        assert len(outs) == 3 and outs[0].data.shape == (2, 8)
        final = bi.final_state(steps)
        np.testing.assert_allclose(final.data[:, :4], outs[-1].data[:, :4])
        np.testing.assert_allclose(final.data[:, 4:], outs[0].data[:, 4:])

        fn = lambda: _sum_all(bi.final_state(steps))
        assert grad_check(fn, steps + bi.params()) <= F64_TOL

    @pytest.mark.parametrize("seed", SEEDS[:6])
    def test_attention_gradients(self, seed):
        rng = np.random.default_rng(seed)
        attn = Attention(4, rng, dtype=np.float64)
        states = [_param(rng, 2, 4) for _ in range(3)]
        fn = lambda: _sum_all(tanh(attn(states)))
        assert grad_check(fn, states + attn.params()) <= F64_TOL

    def test_attention_weights_average_states(self):
        rng = np.random.default_rng(1)
        attn = Attention(3, rng, dtype=np.float64)
        attn.w.data[:] = 0.0
        attn.v.data[:] = 0.0
        states = [Tensor(np.full((1, 3), float(i))) for i in range(3)]
        out = attn(states)
        np.testing.assert_allclose(out.data, 1.0, atol=1e-12)


class TestFloat32Tolerances:
    @pytest.mark.parametrize("seed", SEEDS[:5])
    def test_dense_layer_f32(self, seed):
        rng = np.random.default_rng(seed)
        layer = Dense(4, 3, rng, dtype=np.float32)
        x = Parameter(rng.standard_normal((2, 4)).astype(np.float32))
        fn = lambda: _sum_all(tanh(layer(x)))
        assert grad_check(fn, [x] + layer.params()) <= F32_TOL

    @pytest.mark.parametrize("seed", SEEDS[:5])
    def test_lstm_step_f32(self, seed):
        rng = np.random.default_rng(seed)
        cell = LstmCell(3, 4, rng, dtype=np.float32)
        x = Parameter(rng.standard_normal((2, 3)).astype(np.float32))
        h = Parameter(np.zeros((2, 4), dtype=np.float32))
        c = Parameter(np.zeros((2, 4), dtype=np.float32))
        fn = lambda: _sum_all(add(*cell.step(x, h, c)))
        assert grad_check(fn, [x] + cell.params()) <= F32_TOL


class TestGraphMechanics:
    def test_backward_accumulates_through_shared_nodes(self):
        x = Parameter(np.array([[2.0]]))
        y = add(mul(x, x), x)  # x^2 + x -> dy/dx = 2x + 1 = 5
        y.backward()
        np.testing.assert_allclose(x.grad, [[5.0]])

    def test_backward_requires_scalar(self):
        x = Parameter(np.ones((2, 2)))
        with pytest.raises(ShapeError):
            add(x, x).backward()

    def test_deep_chain_does_not_hit_recursion_limit(self):
        x = Parameter(np.array([[0.1]]))
        out = x
        for _ in range(2000):
            out = tanh(out)
        _sum_all(out).backward()
        assert x.grad is not None

    def test_non_finite_detection(self):
        from blid.nn import assert_finite
        with pytest.raises(NonFiniteValue):
            assert_finite(Tensor(np.array([[np.inf]])), what="probe")

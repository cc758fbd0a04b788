from dataclasses import replace

import numpy as np
import pytest
import torch

from pgtnet.encodings import GraphEncodings, encode_dataset
from pgtnet.errors import ConfigError, ShapeMismatch
from pgtnet.graphbuild import build_dataset, fit_stats, layout_from_stats
from pgtnet.graphbuild.builder import PrefixGraph
from pgtnet.model import PGTNet, PGTNetConfig, Readout, backward, collate, intra_graph_pairs, l1_loss
from pgtnet.model.checkpoint import load_checkpoint, save_checkpoint
from pgtnet.prefixing import build_prefixes

FD_STEP = 1e-6


@pytest.fixture
def dataset(synthetic_log, tiny_model_config):
    records = build_prefixes(synthetic_log)
    stats = fit_stats(records, synthetic_log)
    graphs = build_dataset(records, stats, synthetic_log)
    graphs = encode_dataset(graphs, tiny_model_config.d_pe, tiny_model_config.d_se)
    return graphs, stats, layout_from_stats(stats).width


def _model(config, stats, edge_dim, vocab_extra=0):
    return PGTNet(config, stats.vocab_size + vocab_extra, edge_dim)


def _predict(model, graphs, edge_dim):
    model.eval()
    with torch.no_grad():
        return model(collate(graphs, edge_dim))


def _permuted(graph: PrefixGraph, perm):
    """Relabel node i as perm[i]; encodings rows follow their nodes."""
    inverse = np.argsort(perm)
    enc = graph.encodings
    order = list(reversed(range(graph.num_edges)))
    return PrefixGraph(
        node_class_ids=tuple(graph.node_class_ids[i] for i in inverse),
        edges=tuple((perm[graph.edges[e][0]], perm[graph.edges[e][1]]) for e in order),
        edge_features=tuple(graph.edge_features[e] for e in order),
        target_normalized=graph.target_normalized,
        case_id=graph.case_id,
        k=graph.k,
        encodings=GraphEncodings(enc.lap_pe[inverse], enc.lap_eigenvalues, enc.rwse[inverse]),
    )


def _doubled(graph: PrefixGraph):
    """Disjoint union of a graph with itself, as one graph with copied encodings."""
    n = graph.num_nodes
    enc = graph.encodings
    return PrefixGraph(
        node_class_ids=graph.node_class_ids * 2,
        edges=graph.edges + tuple((s + n, t + n) for s, t in graph.edges),
        edge_features=graph.edge_features * 2,
        target_normalized=graph.target_normalized,
        case_id=graph.case_id,
        k=graph.k,
        encodings=GraphEncodings(np.vstack([enc.lap_pe] * 2), enc.lap_eigenvalues, np.vstack([enc.rwse] * 2)),
    )


def test_intra_graph_pairs():
    batch_vector = torch.tensor([0, 0, 1, 1, 1])
    ptr = torch.tensor([0, 2, 5])
    query, key = intra_graph_pairs(batch_vector, ptr)
    pairs = set(zip(query.tolist(), key.tolist()))
    assert pairs == {(q, k) for q in range(2) for k in range(2)} | {(q, k) for q in range(2, 5) for k in range(2, 5)}
    assert query.numel() == 4 + 9


def test_embedding_row_when_encodings_are_zero(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    graph = graphs[0]
    enc = graph.encodings
    zeroed = PrefixGraph(graph.node_class_ids, graph.edges, graph.edge_features, 0.0, graph.case_id, graph.k,
                         GraphEncodings(np.zeros_like(enc.lap_pe), enc.lap_eigenvalues, np.zeros_like(enc.rwse)))
    model = _model(tiny_model_config, stats, edge_dim)
    with torch.no_grad():
        x, z = model.embed(collate([zeroed], edge_dim))
        expected = model.node_embedding.weight[torch.tensor(graph.node_class_ids)]
    torch.testing.assert_close(x, expected)
    assert z.shape == (graph.num_edges, tiny_model_config.hidden_dim)


def test_single_node_graph_without_edges(tiny_model_config, dataset):
    _, stats, edge_dim = dataset
    graph = encode_dataset([PrefixGraph((1,), (), (), 0.0, "solo", 2)], 3, 4)[0]
    model = _model(tiny_model_config, stats, edge_dim)
    with torch.no_grad():
        x, z = model.embed(collate([graph], edge_dim))
    assert x.shape == (1, tiny_model_config.hidden_dim)
    assert z.shape == (0, tiny_model_config.hidden_dim)
    assert torch.isfinite(_predict(model, [graph], edge_dim)).all()


def test_prediction_is_head_bias_when_last_layer_is_zero(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim)
    with torch.no_grad():
        model.head[-1].weight.zero_()
        model.head[-1].bias.fill_(0.37)
    prediction = _predict(model, graphs[:5], edge_dim)
    torch.testing.assert_close(prediction, torch.full((5,), 0.37, dtype=torch.float64))


def test_identical_graphs_identical_predictions(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim)
    prediction = _predict(model, [graphs[3], graphs[3]], edge_dim)
    assert prediction[0].item() == pytest.approx(prediction[1].item(), abs=1e-12)


def test_batched_equals_sequential(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim)
    batched = _predict(model, graphs[:12], edge_dim)
    sequential = torch.cat([_predict(model, [g], edge_dim) for g in graphs[:12]])
    torch.testing.assert_close(batched, sequential, rtol=0, atol=1e-10)


def test_node_permutation_invariance(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim)
    rng = np.random.default_rng(4)
    for graph in graphs[:100]:
        perm = rng.permutation(graph.num_nodes).tolist()
        original = _predict(model, [graph], edge_dim)
        relabeled = _predict(model, [_permuted(graph, perm)], edge_dim)
        torch.testing.assert_close(original, relabeled, rtol=0, atol=1e-9)


def test_sum_readout_doubles_on_duplicated_graph(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    graph = max(graphs[:20], key=lambda g: g.num_nodes)
    for readout in (Readout.SUM, Readout.MEAN):
        model = _model(replace(tiny_model_config, readout=readout), stats, edge_dim).eval()
        with torch.no_grad():
            single = model.pool(collate([graph], edge_dim))
            doubled = model.pool(collate([_doubled(graph)], edge_dim))
        factor = 2.0 if readout == Readout.SUM else 1.0
        torch.testing.assert_close(doubled, factor * single, rtol=0, atol=1e-10)


def test_zero_parameters_loss_is_mean_abs_target(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim)
    with torch.no_grad():
        for param in model.parameters():
            param.zero_()
    batch = collate(graphs[:6], edge_dim)
    loss, grads = backward(model.eval(), batch)
    assert loss == pytest.approx(float(np.mean([abs(g.target_normalized) for g in graphs[:6]])))
    assert set(grads) == {name for name, _ in model.named_parameters()}


def test_unused_vocabulary_row_has_zero_gradient(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim, vocab_extra=1)
    _, grads = backward(model.eval(), collate(graphs[:6], edge_dim))
    assert not grads["node_embedding.weight"][stats.vocab_size].any()


def test_gradients_match_finite_differences(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim).eval()
    batch = collate(graphs[:4], edge_dim)
    _, grads = backward(model, batch)

    def loss_value():
        with torch.no_grad():
            return l1_loss(model(batch), batch.y).item()

    step = FD_STEP
    rng = np.random.default_rng(0)
    for name, param in model.named_parameters():
        flat = param.data.view(-1)
        for idx in rng.choice(flat.numel(), size=min(2, flat.numel()), replace=False).tolist():
            original = flat[idx].item()
            flat[idx] = original + step
            plus = loss_value()
            flat[idx] = original - step
            minus = loss_value()
            flat[idx] = original
            numeric = (plus - minus) / (2 * step)
            analytic = grads[name].view(-1)[idx].item()
            assert numeric == pytest.approx(analytic, rel=1e-4, abs=1e-7), name


def test_gradients_match_finite_differences_with_dropout(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    config = replace(tiny_model_config, mpnn_dropout=0.2, attn_dropout=0.5)
    model = _model(config, stats, edge_dim).train()
    batch = collate(graphs[:4], edge_dim)
    mask_seed = 17

    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(mask_seed)
        _, grads = backward(model, batch)

    def loss_value():
        # replay the same dropout masks for every perturbed forward pass
        with torch.random.fork_rng(devices=[]), torch.no_grad():
            torch.manual_seed(mask_seed)
            return l1_loss(model(batch), batch.y).item()

    rng = np.random.default_rng(1)
    for name, param in model.named_parameters():
        flat = param.data.view(-1)
        for idx in rng.choice(flat.numel(), size=min(2, flat.numel()), replace=False).tolist():
            original = flat[idx].item()
            flat[idx] = original + FD_STEP
            plus = loss_value()
            flat[idx] = original - FD_STEP
            minus = loss_value()
            flat[idx] = original
            numeric = (plus - minus) / (2 * FD_STEP)
            analytic = grads[name].view(-1)[idx].item()
            assert numeric == pytest.approx(analytic, rel=1e-4, abs=1e-7), name

def test_shape_mismatch_on_encoding_width(dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(replace(tiny_model_config, d_pe=5), stats, edge_dim)
    with pytest.raises(ShapeMismatch):
        model(collate(graphs[:2], edge_dim))
    with pytest.raises(ShapeMismatch):
        collate(graphs[:2], edge_dim + 1)


def test_init_is_seeded(dataset, tiny_model_config):
    _, stats, edge_dim = dataset
    a = _model(tiny_model_config, stats, edge_dim)
    b = _model(tiny_model_config, stats, edge_dim)
    for (name, pa), (_, pb) in zip(a.named_parameters(), b.named_parameters()):
        assert torch.equal(pa, pb), name


def test_checkpoint_round_trip(tmp_path, dataset, tiny_model_config):
    graphs, stats, edge_dim = dataset
    model = _model(tiny_model_config, stats, edge_dim)
    path = save_checkpoint(model, tmp_path / "checkpoint.bin", {"note": "x"})
    loaded, extra = load_checkpoint(path)
    assert extra == {"note": "x"}
    assert loaded.config == tiny_model_config
    torch.testing.assert_close(_predict(loaded, graphs[:4], edge_dim), _predict(model, graphs[:4], edge_dim))


def test_config_validation():
    with pytest.raises(ConfigError):
        PGTNetConfig(hidden_dim=10, num_heads=4)
    with pytest.raises(ConfigError):
        PGTNetConfig(readout="max")
    with pytest.raises(ConfigError):
        PGTNetConfig.from_dict({"hidden_dim": 8, "dropout": 0.1})
    config = PGTNetConfig.from_dict({"readout": "sum", "precision": "single"})
    assert config.readout == Readout.SUM
    assert config.dtype == torch.float32
    assert PGTNetConfig.from_dict(config.to_dict()) == config

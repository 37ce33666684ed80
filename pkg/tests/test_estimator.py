import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from elimcnf import GraphConstraintEncoder
from elimcnf.bench import free_instance, gen_grid_hc
from elimcnf.encoders import MethodError, encode_instance
from elimcnf.formula import Acyclic, Cnf, GraphInstance, NoReach, Reach, write_gcnf
from elimcnf.solver import SAT, UNSAT, solve

from conftest import RING_ORDER, all_true


def test_params_round_trip():
    enc = GraphConstraintEncoder(method="tc", order="minfill")
    assert enc.get_params() == {"method": "tc", "order": "minfill"}
    copy = clone(enc).set_params(method="tr")
    assert copy.method == "tr" and enc.method == "tc"


def test_fit_transform_matches_encode_instance(ring8):
    enc = GraphConstraintEncoder(order=list(RING_ORDER)).fit(ring8)
    assert enc.width_ == 1 and enc.widths_ == [1]
    out = enc.transform(ring8)
    ref = encode_instance(ring8, "ve", RING_ORDER)
    assert out.added_clauses == ref.added_clauses
    assert out.aux == ref.aux


def test_transform_new_base(ring8):
    enc = GraphConstraintEncoder().fit(ring8)
    forced = all_true(ring8)
    assert solve(enc.transform(ring8).to_cnf(ring8.base)).status == SAT
    assert solve(enc.transform(forced).to_cnf(forced.base)).status == UNSAT


def test_grid_width():
    inst = gen_grid_hc((5, 20))
    assert GraphConstraintEncoder().fit(inst).width_ <= 6


def test_accepts_gcnf_text(ring8):
    text = write_gcnf(ring8)
    out = GraphConstraintEncoder(method="tc").fit_transform(text)
    assert len(out.added_clauses) == 72


def test_mixed_methods(cycle8):
    inst = free_instance(cycle8, [Acyclic(), Reach(3, 7), NoReach(1, 1)])
    enc = GraphConstraintEncoder(method=["tr", "ve", "ve"]).fit(inst)
    assert enc.orderings_[0] is None
    assert enc.orderings_[1].order[-2:] == (3, 7)
    ref = encode_instance(inst, ["tr", "ve", "ve"])
    assert enc.transform(inst).added_clauses == ref.added_clauses


def test_not_fitted(ring8):
    with pytest.raises(NotFittedError):
        GraphConstraintEncoder().transform(ring8)


def test_structure_mismatch(ring8, cycle8):
    enc = GraphConstraintEncoder().fit(ring8)
    with pytest.raises(ValueError):
        enc.transform(free_instance(cycle8, [Reach(1, 2)]))


def test_bad_params(ring8):
    with pytest.raises(MethodError):
        GraphConstraintEncoder(method="explicit").fit(ring8)
    with pytest.raises(ValueError):
        GraphConstraintEncoder(order="random").fit(ring8)
    with pytest.raises(TypeError):
        GraphConstraintEncoder().fit(42)


def test_pipeline(ring8):
    pipe = make_pipeline(FunctionTransformer(all_true), GraphConstraintEncoder())
    out = pipe.fit_transform(ring8)
    forced = all_true(ring8)
    assert solve(out.to_cnf(forced.base)).status == UNSAT


def test_path_input(tmp_path, ring8):
    path = tmp_path / "i.gcnf"
    path.write_bytes(write_gcnf(ring8))
    assert GraphConstraintEncoder().fit(str(path)).n_nodes_ == 8

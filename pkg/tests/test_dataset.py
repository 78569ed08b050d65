import math

import numpy as np
import pytest

from amids import dataset
from amids.errors import (
    BoundsError, EmptyDatasetError, InsufficientDataError, ParseError,
    StratificationError, UnknownSymbolError,
)


def make_line(protocol="tcp", service="http", flag="SF", label="normal", difficulty="21", src_bytes="181"):
    fields = ["0", protocol, service, flag, src_bytes] + ["0"] * 36
    out = fields + [label]
    if difficulty is not None:
        out.append(difficulty)
    return ",".join(out)


def test_parse_line_with_and_without_difficulty():
    rec = dataset.parse_line(make_line())
    assert rec.label == "normal" and rec.difficulty == 21
    assert rec.protocol == "tcp" and rec.service == "http" and rec.flag == "SF"
    rec = dataset.parse_line(make_line(difficulty=None))
    assert rec.difficulty is None
    assert len(rec.features) == 41


@pytest.mark.parametrize("text", ["0,tcp,http", make_line() + ",extra", make_line(label="")])
def test_parse_line_rejects_malformed(text):
    with pytest.raises(ParseError):
        dataset.parse_line(text, lineno=7)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as err:
        dataset.parse_nslkdd([make_line(), "1,2,3"])
    assert err.value.lineno == 2


def test_unlabeled_line_only_when_allowed():
    text = ",".join(make_line(difficulty=None).split(",")[:41])
    with pytest.raises(ParseError):
        dataset.parse_line(text)
    assert dataset.parse_line(text, allow_unlabeled=True).label is None


def test_empty_input():
    with pytest.raises(EmptyDatasetError):
        dataset.parse_nslkdd(["", "  \n"])


def test_binarize_label():
    assert dataset.binarize_label("normal") == 0
    assert dataset.binarize_label("neptune") == 1
    assert dataset.binarize_label("smurf") == 1
    assert dataset.binarize_label(" Normal ") == 0


def test_attack_categories():
    assert dataset.attack_category("neptune") == "dos"
    assert dataset.attack_category("satan") == "probe"
    assert dataset.attack_category("guess_passwd") == "r2l"
    assert dataset.attack_category("rootkit") == "u2r"
    assert dataset.attack_category("normal") == "normal"
    assert dataset.attack_category("brand_new") == "unknown"



def test_protocol_codes():
    table = dataset.EncodingTable()
    assert [table.protocol_code(p) for p in ("tcp", "udp", "icmp")] == [2, 3, 4]


def test_flag_codes_exact():
    table = dataset.EncodingTable()
    assert table.flag_code("SF") == 13 and table.flag_code("S0") == 9
    assert table.flag_code("OTH") == 5
    assert table.flag_code("SH") == max(dataset.FLAG_CODES.values())
    assert sorted(dataset.FLAG_CODES.values()) == list(range(5, 5 + len(dataset.FLAG_CODES)))


def test_service_codes_sorted_from_15():
    recs = [dataset.parse_line(make_line(service=s)) for s in ("http", "ftp", "http")]
    table = dataset.build_encoding(recs)
    assert table.service_map == {"ftp": 15, "http": 16}
    X, y = dataset.encode_records(recs, table)
    assert X[:, 2].tolist() == [16.0, 15.0, 16.0]
    assert X[0, 1] == 2.0 and X[0, 3] == dataset.FLAG_CODES["SF"]


def test_unknown_symbols_raise():
    table = dataset.build_encoding([dataset.parse_line(make_line())])
    with pytest.raises(UnknownSymbolError) as err:
        dataset.encode(dataset.parse_line(make_line(service="tftp_u")), table)
    assert err.value.field == "service" and "tftp_u" in str(err.value)
    with pytest.raises(UnknownSymbolError):
        dataset.encode(dataset.parse_line(make_line(protocol="sctp")), table)


def test_non_numeric_feature():
    table = dataset.build_encoding([dataset.parse_line(make_line())])
    rec = dataset.parse_line(make_line(src_bytes="lots"))
    with pytest.raises(ParseError):
        dataset.encode_records([rec], table)


def test_encode_matches_encode_records(fixture_records, fixture_table, fixture_xy):
    X, y = fixture_xy
    for i in (0, 17, 999):
        er = dataset.encode(fixture_records[i], fixture_table)
        assert np.array_equal(er.x, X[i]) and er.y == y[i]


def test_standardization_oracle():
    params = dataset.fit_standardization(np.array([[2.0], [4.0], [6.0]]))
    assert params.mu[0] == 4.0
    assert math.isclose(params.sigma[0], math.sqrt(8 / 3), rel_tol=1e-15)
    z = dataset.standardize(np.array([4.0]), params)
    assert z[0] == 0.0


def test_constant_feature_maps_to_zero():
    X = np.array([[0.1, 1.0], [0.1, 2.0], [0.1, 3.0]])
    params = dataset.fit_standardization(X)
    assert params.constant_mask.tolist() == [True, False]
    Z = dataset.standardize(X, params)
    assert np.all(Z[:, 0] == 0.0)
    assert np.all(dataset.standardize(np.array([[7.0, 2.0]]), params)[:, 0] == 0.0)


def test_standardize_needs_two_rows():
    with pytest.raises(InsufficientDataError):
        dataset.fit_standardization(np.ones((1, 3)))


def test_standardized_fixture_moments(fixture_std):
    Z, _, params = fixture_std
    varying = ~params.constant_mask
    assert np.all(np.abs(Z.mean(axis=0)) <= 1e-9)
    assert np.all(np.abs(Z[:, varying].std(axis=0) - 1.0) <= 1e-6)


def test_standardize_encoded_record(fixture_records, fixture_table, fixture_std):
    Z, _, params = fixture_std
    er = dataset.standardize(dataset.encode(fixture_records[5], fixture_table), params)
    assert np.array_equal(er.x, Z[5])


def test_fixture_counts(fixture_records):
    counts = dataset.category_counts(fixture_records)
    assert sum(counts.values()) == 1000
    assert counts["normal"] == sum(r.label == "normal" for r in fixture_records)


def test_stratified_kfold_properties():
    y = np.array([0] * 53 + [1] * 27)
    folds = dataset.stratified_kfold(y, 10, seed=3)
    seen = np.zeros(y.size, dtype=int)
    sizes = []
    for train, test in folds.splits():
        assert np.intersect1d(train, test).size == 0
        assert train.size + test.size == y.size
        seen[test] += 1
        sizes.append(test.size)
        # per-class counts within one of the ideal share
        assert abs((y[test] == 1).sum() - 2.7) < 1.0 + 1e-9
    assert np.all(seen == 1)
    assert max(sizes) - min(sizes) <= 1


def test_kfold_deterministic_and_seed_sensitive():
    y = np.arange(100) % 3 == 0
    a = dataset.stratified_kfold(y.astype(int), 5, 7).assignment
    b = dataset.stratified_kfold(y.astype(int), 5, 7).assignment
    c = dataset.stratified_kfold(y.astype(int), 5, 8).assignment
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_kfold_errors():
    with pytest.raises(StratificationError):
        dataset.stratified_kfold(np.array([0, 0, 0, 1]), 2, 0)
    with pytest.raises(StratificationError):
        dataset.stratified_kfold(np.array([0, 1, 0, 1]), 1, 0)


def test_subsample_stratified_quotas():
    y = np.array([0] * 700 + [1] * 300)
    idx = dataset.subsample_indices(y, 100, seed=0)
    assert idx.size == 100 and np.unique(idx).size == 100
    assert (y[idx] == 1).sum() == 30
    idx = dataset.subsample_indices(y, 15, seed=0)
    # 10.5 / 4.5: the tie on remainders goes to the lower class
    assert (y[idx] == 0).sum() == 11


def test_subsample_bounds():
    y = np.zeros(10, dtype=int)
    with pytest.raises(BoundsError):
        dataset.subsample_indices(y, 11, 0)
    assert dataset.subsample_indices(y, 0, 0).size == 0
    assert np.array_equal(np.sort(dataset.subsample_indices(y, 10, 0)), np.arange(10))


def test_encoded_csv_round_trip(tmp_path, fixture_xy):
    X, y = fixture_xy
    path = tmp_path / "enc.csv"
    dataset.write_encoded_csv(str(path), X, y)
    assert dataset.is_encoded_csv(str(path))
    X2, y2 = dataset.read_encoded_csv(str(path))
    assert np.array_equal(X, X2) and np.array_equal(y, y2)


def test_encoding_table_round_trip(fixture_table):
    again = dataset.EncodingTable.from_dict(fixture_table.to_dict())
    assert again == fixture_table


def test_records_from_text():
    recs = dataset.records_from_text(make_line() + "\n\n" + make_line(label="smurf") + "\n")
    assert [r.label for r in recs] == ["normal", "smurf"]

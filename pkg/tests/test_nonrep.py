import copy
import json

import pytest

from blowblur.blowup import CliqueScheme, Truncation, alpha_of_graph, blur_structure, truncate
from blowblur.finite_ra import make_M
from blowblur.graphs import Coloring, make_disjoint_cliques, minimum_coloring
from blowblur.nonrep import (TOOL_VERSION, CertificateCheckError, CertificateFormatError, CertificateVersionError,
                             NonRepCertificate, _digest, base_partition, build_partition, certify,
                             check_certificate, coarse_embedding_table, f_sequence, monk_sequence, monochromatic,
                             verify_mono_zero)
from blowblur.symbolic import BaseBlock, ColorBlock, IdBlock, UnionBlock, block_from_dict


@pytest.fixture(scope="module")
def blur_cert(blur6):
    return certify(blur6)


@pytest.fixture(scope="module")
def alpha3():
    return alpha_of_graph(CliqueScheme(3), 3)


@pytest.fixture(scope="module")
def alpha_cert(alpha3):
    return certify(alpha3, minimum_coloring(make_disjoint_cliques(10, 3)), copies=10)


def test_coarse_table_follows_M(blur6):
    table = coarse_embedding_table(blur6)
    I = blur6.I
    for P in I:
        for Q in I:
            if P == Q:
                want = {BaseBlock(R) for R in I if R != P} | {IdBlock()}
            else:
                want = {BaseBlock(R) for R in I}
            assert table[P, Q] == want
    # the block of P never meets P;P
    assert all(BaseBlock(P) not in table[P, P] for P in I)


def test_base_partition(blur6):
    blocks = base_partition(blur6)
    assert len(blocks) == 7 and blocks[0] == IdBlock()
    s = truncate(blur6, Truncation(2))
    for a in s.atoms:
        assert sum(b.contains(a) for b in blocks) == 1


def test_build_partition(alpha3):
    g = make_disjoint_cliques(10, 3)
    blocks = build_partition(alpha3, minimum_coloring(g), 10)
    # N colours times n graph colours, plus the identity
    assert len(blocks) == 3 * 3 + 1
    for b in blocks[1:]:
        assert all(not g.adjacent(u, v) for u in b.nodes for v in b.nodes)


def test_monochromatic():
    assert monochromatic(BaseBlock("A"))
    assert monochromatic(UnionBlock((ColorBlock(frozenset({0}), 1, 0), ColorBlock(frozenset({4}), 1, 1))))
    assert not monochromatic(UnionBlock((BaseBlock("A"), BaseBlock("B"))))
    assert not monochromatic(UnionBlock((ColorBlock(frozenset({0}), 0), ColorBlock(frozenset({1}), 1))))


def test_mono_zero_on_base_blocks(blur6):
    s = truncate(blur6, Truncation(4))
    for P in blur6.I:
        assert verify_mono_zero(blur6, BaseBlock(P), finite=s).ok


def test_mono_zero_finds_a_witness(blur6, alpha3):
    s = truncate(blur6, Truncation(3))
    v = verify_mono_zero(blur6, UnionBlock((BaseBlock("A"), BaseBlock("B"))), finite=s)
    assert not v.ok and len(v.witness) == 3
    assert s.consistent(*v.witness)
    # nodes 0 and 1 are adjacent, so the block holds a consistent triangle
    bad = ColorBlock(frozenset({0, 1}), 0)
    v = verify_mono_zero(alpha3, bad, Truncation(copies=4))
    assert not v.ok
    with pytest.raises(ValueError):
        verify_mono_zero(blur6, IdBlock(), finite=s)


def test_blur_certificate(blur_cert):
    assert len(blur_cert["blocks"]) == 7
    assert blur_cert["flags"] == {"unbounded_carrier": True, "finite_partition": True, "all_mono_zero": True}
    assert blur_cert["tool_version"] == TOOL_VERSION
    assert check_certificate(blur_cert)


def test_alpha_certificate(alpha_cert):
    assert len(alpha_cert["blocks"]) == 10
    assert all(m["zero"] for m in alpha_cert["mono_zero"])
    assert check_certificate(alpha_cert)


def test_certify_refuses_a_bad_coloring(alpha3):
    # one colour for every node puts adjacent nodes in one block
    flat = Coloring({v: 0 for v in range(30)})
    with pytest.raises(ValueError):
        certify(alpha3, flat, copies=10)


def test_block_round_trip(blur_cert, alpha_cert):
    for cert in (blur_cert, alpha_cert):
        assert [block_from_dict(b.as_dict()) for b in cert.blocks] == cert.blocks
    u = UnionBlock((BaseBlock("A"), ColorBlock(frozenset({2, 5}), 1, 3)))
    assert block_from_dict(json.loads(json.dumps(u.as_dict()))) == u
    with pytest.raises(ValueError):
        block_from_dict({"kind": "triangle"})


def mutations(data):
    first_coarse = sorted(data["coarse_table"])[0]
    return {
        "spec": lambda d: d["spec"].update(I=d["spec"]["I"] + ["G"]) if "I" in d["spec"] else d["spec"].update(n=2),
        "blocks": lambda d: d["blocks"].pop(),
        "mono_zero": lambda d: d["mono_zero"][0].update(zero=False),
        "coarse_table": lambda d: d["coarse_table"][first_coarse].pop(),
        "flags": lambda d: d["flags"].update(unbounded_carrier=not d["flags"]["unbounded_carrier"]),
        "seed": lambda d: d.update(seed=d["seed"] + 1),
        "tool_version": lambda d: d.update(tool_version="blowblur-cert/0"),
        "digest": lambda d: d.update(digest="0" * 64),
    }


@pytest.mark.parametrize("which", ["blur", "alpha"])
def test_every_field_mutation_fails(which, blur_cert, alpha_cert):
    cert = blur_cert if which == "blur" else alpha_cert
    for field, mutate in mutations(cert.data).items():
        d = copy.deepcopy(cert.data)
        mutate(d)
        with pytest.raises((CertificateCheckError, CertificateVersionError)):
            check_certificate(d)


@pytest.mark.parametrize("which", ["blur", "alpha"])
def test_redigested_mutations_name_the_field(which, blur_cert, alpha_cert):
    cert = blur_cert if which == "blur" else alpha_cert
    for field, mutate in mutations(cert.data).items():
        if field in ("seed", "digest", "tool_version"):
            continue
        d = copy.deepcopy(cert.data)
        mutate(d)
        d["digest"] = _digest(d)
        with pytest.raises(CertificateCheckError) as e:
            check_certificate(d)
        assert e.value.item.split("[")[0].split(" ")[0] in (field, "blocks", "block", "mono_zero")


def test_missing_field_and_bad_json(tmp_path, blur_cert):
    d = dict(blur_cert.data)
    del d["flags"]
    with pytest.raises(CertificateFormatError):
        check_certificate(d)
    p = tmp_path / "cut.json"
    p.write_text(blur_cert.to_json()[:200])
    with pytest.raises(CertificateFormatError):
        check_certificate(p)
    with pytest.raises(CertificateFormatError):
        check_certificate(tmp_path / "absent.json")


def test_version_mismatch(blur_cert):
    d = dict(blur_cert.data, tool_version="blowblur-cert/0 (0.0.1)")
    d["digest"] = _digest(d)
    with pytest.raises(CertificateVersionError):
        check_certificate(d)


def test_save_load_is_byte_stable(tmp_path, blur6, blur_cert):
    p = blur_cert.save(tmp_path / "c.json")
    assert NonRepCertificate.load(p) == blur_cert
    assert check_certificate(p)
    again = certify(blur6).save(tmp_path / "d.json")
    assert p.read_bytes() == again.read_bytes()


def test_f21_certificate_matches_blur(f21, blur_cert):
    c = certify(f21)
    for key in ("blocks", "mono_zero", "coarse_table", "flags"):
        assert c[key] == blur_cert[key]
    assert check_certificate(c)


def test_larger_base_sets():
    for I in ("ABCDEFG", "ABCDEFGH"):
        assert check_certificate(certify(blur_structure(make_M(list(I))), depth=3))


def test_monk_sequence():
    ms = monk_sequence(3, 3, copies=6)
    assert [m.spec.graph.size for m in ms] == [3, 4, 5]
    assert [m.chromatic_number for m in ms] == [3, 4, 5]
    for m in ms:
        assert check_certificate(m.certificate)
    with pytest.raises(ValueError):
        monk_sequence(1, 2)


def test_f_sequence():
    out = f_sequence(2)
    assert [len(s.I) for s, _ in out] == [6, 9]
    assert all(r == [] for _, r in out)
    assert f_sequence(1, check=False)[0][1] is None


def test_flipped_verdict_names_the_block(blur_cert):
    d = copy.deepcopy(blur_cert.data)
    d["mono_zero"][2]["zero"] = False
    with pytest.raises(CertificateCheckError) as e:
        check_certificate(d)
    assert e.value.item == "mono_zero verdict for block H^C"

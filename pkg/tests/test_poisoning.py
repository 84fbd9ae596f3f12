"""Attack variants, closure evidence, necessity drills, dominated strategies."""

import random

import pytest

from anchortree import (
    CLOSURE_TABLE,
    Mechanism,
    Registry,
    UnknownMechanism,
    Variant,
    authenticate_tree,
    detect_duplicate_manifests,
    keygen,
    make_scenario,
    necessity_drill,
    reconstruct,
    run_enterprise_griefing,
    run_fraudulent_root,
    run_honest_session,
    run_malicious_child,
    run_tree_spoofing,
    run_variant,
)
from treegen import build_random_tree, fresh_key, random_operator, register_with_key

RUNNERS = {
    Variant.FRAUDULENT_ROOT: run_fraudulent_root,
    Variant.MALICIOUS_CHILD: run_malicious_child,
    Variant.TREE_SPOOFING: run_tree_spoofing,
}


@pytest.mark.parametrize("variant", list(Variant), ids=lambda v: v.value)
class TestClosures:
    def test_closed_by_table_row(self, variant):
        outcome = run_variant(variant, seed=7)
        assert outcome.closed
        assert outcome.closed_by is CLOSURE_TABLE[variant]

    def test_victim_auth_bit_identical(self, variant):
        registry, scenario = make_scenario(variant, seed=8)
        before = authenticate_tree(
            scenario.victim_key, scenario.victim_root, reconstruct(registry.log))
        outcome = RUNNERS[variant](registry, scenario)
        after = authenticate_tree(
            scenario.victim_key, scenario.victim_root, reconstruct(registry.log))
        assert outcome.evidence["victim_auth_unchanged"]
        assert after == before
        assert after.to_json_dict() == before.to_json_dict()
        assert before.authenticated

    def test_outcome_serializes(self, variant):
        import json
        outcome = run_variant(variant, seed=9)
        json.dumps(outcome.to_json_dict())


class TestFraudulentRootDetails:
    def test_evidence_fields(self):
        outcome = run_variant(Variant.FRAUDULENT_ROOT, seed=10)
        ev = outcome.evidence
        assert ev["tree_ids_distinct"]
        assert ev["priority_names_victim"]
        assert ev["adversary_cannot_authenticate_victim"]
        assert ev["victim_tree_id"] != ev["fraudulent_tree_id"]

    def test_two_adversaries_three_distinct_identities(self):
        registry, scenario = make_scenario(Variant.FRAUDULENT_ROOT, seed=11)
        rng = random.Random(11)
        roots = [scenario.victim_root]
        for _ in range(2):
            roots.append(register_with_key(
                registry, scenario.operator, keygen(rng.randbytes(32)), "DATASET", rng))
        forest = reconstruct(registry.log)
        identities = {forest.roots[r.value].tree_id.hex for r in roots}
        assert len(identities) == 3


class TestMaliciousChildDetails:
    def test_suppression_and_attribution(self):
        outcome = run_variant(Variant.MALICIOUS_CHILD, seed=12)
        ev = outcome.evidence
        assert ev["suppressed_count"] == 3
        assert ev["suppressed_exactly_attachment"]
        assert ev["void_commitment_zero"]
        assert ev["attributable_to_adversary"]
        assert ev["not_attributable_to_victim"]
        assert ev["log_strictly_grown"]
        assert ev["cross_edge_recorded"]


class TestTreeSpoofingDetails:
    def test_all_paths_closed(self):
        outcome = run_variant(Variant.TREE_SPOOFING, seed=13)
        ev = outcome.evidence
        assert ev["rejections"] == {
            "gate": "NotOperator",
            "zero_commitment": "MissingTokenCommitment",
            "tree_mismatch": "TreeIdMismatch",
        }
        assert ev["spoofed_root_is_duplicate_claim"]
        assert ev["spoof_not_in_victim_tree"]
        assert ev["spoof_fails_under_victim_key"]
        assert ev["spoof_fails_under_adversary_key"]


class TestNecessityDrills:
    @pytest.mark.parametrize("mechanism", list(Mechanism), ids=lambda m: m.value)
    def test_drill_flips_its_variant(self, mechanism):
        report = necessity_drill(mechanism, seed=20)
        assert report.harmful_success
        assert report.mechanism is mechanism
        assert CLOSURE_TABLE[report.variant] is mechanism

    @pytest.mark.parametrize("mechanism", list(Mechanism), ids=lambda m: m.value)
    def test_other_variants_stay_closed(self, mechanism):
        drilled_variant = necessity_drill(mechanism, seed=21).variant
        for variant in Variant:
            if variant is drilled_variant:
                continue
            assert run_variant(variant, seed=22).closed

    def test_priority_drill_evidence(self):
        report = necessity_drill(Mechanism.CRYPTOGRAPHIC_PRIORITY, seed=23)
        ev = report.evidence
        assert ev["victim_self_consistent"] and ev["fraud_self_consistent"]
        assert not ev["decidable_from_identity_alone"]

    def test_cascade_drill_leaves_attachment_visible(self):
        report = necessity_drill(Mechanism.GOVERNANCE_CASCADE, seed=24)
        assert report.evidence["void_registered"]
        assert report.evidence["suppression_empty"]
        assert report.evidence["attachment_visible"]

    def test_enforcement_drill_accepts_spoof(self):
        report = necessity_drill(Mechanism.CONTRACT_ENFORCEMENT, seed=25)
        ev = report.evidence
        assert ev["gate_bypassed"]
        assert ev["zero_commitment_accepted"]
        assert ev["spoofed_member_in_victim_tree"]
        assert ev["separation_violation_detected"]

    def test_unknown_mechanism(self):
        with pytest.raises(UnknownMechanism):
            necessity_drill("PRAYER")  # type: ignore[arg-type]


class TestDominatedStrategies:
    def test_enterprise_griefing_is_self_defeating(self):
        rng = random.Random(30)
        operator = random_operator(rng)
        registry = Registry([operator], seed=30)
        key = fresh_key(rng)
        evidence = run_enterprise_griefing(registry, operator, key, 8, seed=31)
        assert evidence["distinct_ids"]
        assert evidence["distinct_commitments"]
        assert evidence["all_verify_under_batch_key"]
        assert evidence["duplicate_manifest_flagged"]

    def test_detector_ignores_governance_and_unique_manifests(self):
        rng = random.Random(32)
        operator = random_operator(rng)
        registry = Registry([operator], seed=32)
        key = fresh_key(rng)
        root = build_random_tree(registry, operator, key, rng, n_nodes=30,
                                 governance_fraction=0.2)
        tree = reconstruct(registry.log).roots[root.value]
        flagged = detect_duplicate_manifests(tree)
        assert flagged == {}  # random manifests collide with probability ~0

    def test_honest_session_completes_clean(self):
        summary = run_honest_session(seed=33)
        assert summary["errors"] == 0
        assert summary["authenticated"]
        assert summary["events"] == 6
        assert summary["governance_skipped"] == 2


class TestScenario:
    def test_victim_registered_before_attack(self):
        registry, scenario = make_scenario(Variant.FRAUDULENT_ROOT, seed=40)
        assert scenario.victim_root.value in registry.registered
        assert scenario.script
        assert scenario.adversary_address.address not in registry.operators

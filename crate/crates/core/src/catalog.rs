//! Named checks with their anchor formulas and default tolerances.

use serde::Serialize;

use crate::scenario::Suite;

/// A `Check` decides pass/fail; a `Diagnostic` is evaluated and reported
/// but never fails a run (used for alternative conventions that disagree
/// with the generated equations).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Check,
    Diagnostic,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    pub tolerance: f64,
    pub suite: Suite,
    pub role: Role,
}

const fn check(name: &'static str, anchor: &'static str, tolerance: f64, suite: Suite) -> CheckInfo {
    CheckInfo { name, anchor, tolerance, suite, role: Role::Check }
}

const fn diag(name: &'static str, anchor: &'static str, tolerance: f64, suite: Suite) -> CheckInfo {
    CheckInfo { name, anchor, tolerance, suite, role: Role::Diagnostic }
}

use Suite::*;

pub const CATALOG: &[CheckInfo] = &[
    check("factorization", "M(t)⁻¹E(t) = V(t)f⁻¹", 1e-9, Factorization),
    check("frame_positive", "(M V f⁻¹)₋ = 0", 1e-9, Factorization),
    check("recursion_order_independence", "M is independent of the variable driving the recursion", 1e-9, Factorization),
    check("vacuum_commutation", "[J_i, J_j] = 0", 1e-12, Factorization),
    check("lax_bracket", "[∂_x − (J_1 + u_f), MJ_1M⁻¹] = 0", 1e-9, Factorization),
    diag("lax_bracket_plus_sign", "[∂_x + J_1 + u_f, MJ_1M⁻¹] = 0", 1e-9, Factorization),
    check("frame_ode", "∂_{t_j}E = (MJ_jM⁻¹)₊E", 1e-9, Factorization),
    check("reality_propagation", "u_f lies in the real form fixed by the splitting's involutions", 1e-9, Factorization),
    check("stabilizer_invariance", "u_{fh} = u_f and M_{fh} = M_f h for h commuting with every J_j", 1e-9, Factorization),
    check("conjugation_covariance", "u_{kfk⁻¹} = k u_f k⁻¹, M̃ = kMk⁻¹, Ẽ = kEk⁻¹", 1e-9, Factorization),
    check("gl_coordinate_change", "flows in the basis a^jλ^k agree with the e_iiλ^k flows after the linear change of times", 1e-9, Factorization),
    check("flow_consistency", "∂_{t_j}u_f = [∂_x − (J_1 + u_f), (MJ_jM⁻¹)₊]", 1e-9, Flows),
    check("q_recursion", "the recursion P_{j+1} = −½a(∂_xP_j + [T_j, u]), T_{j+1} = ½aΣ(P P + T T) reproduces MJ_1M⁻¹", 1e-8, Flows),
    check("q_closed_forms", "Q_{−1} = (a/2)(−u_x + u²), Q_{−2} = −¼u_xx + ½u³ − ¼(uu_x − u_xu)", 1e-8, Flows),
    check("q_tables_2x2", "Q_{−1} = (i/2)[[qr, −q_x], [r_x, −qr]], Q_{−2} = ¼[[q_xr − qr_x, −q_xx + 2q²r], [−r_xx + 2qr², qr_x − q_xr]]", 1e-8, Flows),
    check("q_square", "Q² + λ²I = 0", 1e-9, Flows),
    check("flow_akns_t2", "q_t = −(i/2)(q_xx − 2q²r), r_t = (i/2)(r_xx − 2qr²)", 1e-8, Flows),
    check("flow_akns_t3", "q_t = −¼(q_xxx − 6qq_xr), r_t = −¼(r_xxx − 6qrr_x)", 1e-8, Flows),
    diag("flow_akns_t3_alt", "q_t = −¼(q_xxx − 6qq_xr), r_t = ¼(r_xxx − 6qrr_x)", 1e-8, Flows),
    check("flow_nls", "r_t = (i/2)(r_xx + 2|r|²r)", 1e-8, Flows),
    check("flow_mkdv", "r_t = −¼(r_xxx + 6r²r_x)", 1e-8, Flows),
    diag("flow_mkdv_alt", "r_t = ¼(r_xxx + 6r²r_x)", 1e-8, Flows),
    check("flow_cmkdv", "q_t = ¼(q_xxx − 6q²q_x)", 1e-8, Flows),
    check("flow_kdv", "r_t = ¼(r_xxx − 6rr_x)", 1e-8, Flows),
    check("flow_n_wave", "u_{t_{i,1}} = w_x − [u, w] with w = ad(e_ii)ad(a)⁻¹u", 1e-8, Flows),
    check("flow_vector_t2", "q_t = (i/2)(−q_xx + 2qrq), r_t = (i/2)(r_xx − 2rqr)", 1e-8, Flows),
    check("flow_vector_t3", "u_t = ¼(−u_xxx + 3u²u_x + 3u_xu²)", 1e-8, Flows),
    diag("flow_vector_t3_alt", "q_t = ¼(−q_xxx + 3qrq_x + qr_xq + 2q_xrq)", 1e-8, Flows),
    check("flow_vector_nls", "q_t = −(i/2)(q_xx + 2‖q‖²q)", 1e-8, Flows),
    diag("flow_vector_nls_alt", "q_t = (i/2)(q_xx + 2|q|²q)", 1e-8, Flows),
    check("flow_vector_mkdv", "r_t = −¼(r_xxx + 3|r|²r_x + 3(r·r_x)r)", 1e-8, Flows),
    diag("flow_vector_mkdv_alt", "r_t = ¼(r_xxx + 6|r|²r_x)", 1e-8, Flows),
    check("tau_defining_relation", "∂_{t_j} ln τ_f = ⟨J_j, M⁻¹M_λ⟩₋₁", 1e-9, Tau),
    check("tau_closedness", "the one-form Σ⟨J_j, M⁻¹M_λ⟩₋₁ dt_j is closed (path independence)", 1e-9, Tau),
    check("tau_second_partial", "(ln τ_f)_{t_jt_k} = ⟨MJ_jM⁻¹, ∂_λ(MJ_kM⁻¹)₊⟩₋₁", 1e-9, Tau),
    check("tau_second_partial_symmetry", "⟨MJ_jM⁻¹, ∂_λ(MJ_kM⁻¹)₊⟩₋₁ is symmetric in j, k", 1e-9, Tau),
    check("tau_first_flow_partial", "(ln τ_f)_{t_1t_j} = ⟨MJ_jM⁻¹, ∂_λJ_1⟩₋₁", 1e-9, Tau),
    check("tau_shift_constancy", "∂_{t_j}(ln τ_{fh} − ln τ_f) = ⟨J_j, h⁻¹h_λ⟩₋₁, a constant", 1e-9, Tau),
    check("tau_conjugation_invariance", "(ln τ_{kfk⁻¹})_{t_jt_l} = (ln τ_f)_{t_jt_l}", 1e-9, Tau),
    check("akns_tau_xx", "(ln τ_f)_{t_1t_1} = −qr", 1e-8, Tau),
    check("akns_tau_xt2", "(ln τ_f)_{t_1t_2} = κ(q_{t_1}r − r_{t_1}q) with κ detected from {½, −½, i/2, −i/2}", 1e-8, Tau),
    diag("akns_tau_xt2_alt", "(ln τ_f)_{t_1t_2} = ½(q_{t_1}r − r_{t_1}q)", 1e-8, Tau),
    check("akns_tau_ode", "q_x = (y₁′/(2y₁) − y₂/(2κy₁))q, r_x = (y₁′/(2y₁) + y₂/(2κy₁))r", 1e-8, Tau),
    diag("akns_tau_ode_alt", "q_x = −(y₂/y₁ + y₁′/(2y₁))q, r_x = (y₂/y₁ − y₁′/(2y₁))r", 1e-8, Tau),
    check("thm7.1_tau_uu", "(ln τ_f)_{t_{i,1}t_{k,1}} = −v_{ik}v_{ki}", 1e-8, Tau),
    diag("gl_tau_uu_alt", "(ln τ_f)_{t_{i,1}t_{k,1}} = (c_i − c_k)²u_{ik}u_{ki}", 1e-8, Tau),
    check("sigma_tau_vsq", "(ln τ_f)_{t_{i,1}t_{k,1}} = −v_{ik}² for symmetric v_f", 1e-8, Tau),
    check("kdv_tau", "(ln τ_f)_{t_1t_1} = −r", 1e-8, Tau),
    check("kdv_two_constructions", "gauging f by I − ½λ⁻¹e₁₂ into the a = diag(1,−1) AKNS hierarchy gives q ≡ 1, the same r and the same ln τ", 1e-8, Tau),
    check("virasoro_bracket", "[Z_j, Z_k] = (k − j)Z_{j+k}", 1e-8, Virasoro),
    check("virasoro_tangency", "Z_ℓ(f)f⁻¹ has only negative λ-degrees", 1e-12, Virasoro),
    check("virasoro_frame_variation", "δ_ℓM·M⁻¹ = −(λ^ℓE(λf_λf⁻¹ + fΓf⁻¹)E⁻¹)₋ (ε-route)", 1e-9, Virasoro),
    check("virasoro_frame_variation_gl", "−(λ^{ℓ+1}M_λM⁻¹ + λ^ℓM𝒥M⁻¹)₋ = −(λ^ℓE(λf_λf⁻¹)E⁻¹)₋", 1e-8, Virasoro),
    check("virasoro_general_frame_variation", "(δM)M⁻¹ = (E·δf·f⁻¹·E⁻¹)₋ for a tangent δf (ε-route)", 1e-9, Virasoro),
    check("virasoro_tau_variation", "δ_ℓ ln τ_f = ⟨λ^ℓE(λf_λf⁻¹ + fΓf⁻¹)E⁻¹, λE_λE⁻¹⟩₀ (ε-route)", 1e-8, Virasoro),
    check("virasoro_general_tau_variation", "δ ln τ_f = −⟨(δM)M⁻¹, E_λE⁻¹⟩₋₁ (ε-route)", 1e-9, Virasoro),
    check("virasoro_pairing_index", "⟨A, λB⟩₀ = ⟨A, B⟩₋₁", 1e-9, Virasoro),
    check("virasoro_operator", "ζ_ℓX = Σ j t_{i,j}X_{t_{i,j+ℓ}} + Σ_{j=1}^{ℓ−1}(½X_{t_{i,j}}X_{t_{i,ℓ−j}} + ½X_{t_{i,j}t_{i,ℓ−j}}) − ½c_ℓ(f)", 1e-7, Virasoro),
    diag("virasoro_operator_alt", "ζ_ℓX = Σ j t_{i,j}X_{t_{i,j+ℓ}} + Σ_{j=1}^{ℓ−1}(X_{t_{i,j}}X_{t_{i,ℓ−j}} + ½X_{t_{i,j}t_{i,ℓ−j}}) − ½c_ℓ(f)", 1e-7, Virasoro),
    check("eta_tangency", "η_j(f) = ½ζ_{2j}(f) is tangent to the σ-fixed loops", 1e-9, Virasoro),
    check("eta_bracket", "[η_j, η_k] = (k − j)η_{j+k}", 1e-8, Virasoro),
    diag("eta_bracket_alt", "[η_j, η_k] = (k − j)η_{j+k} with η_j = −½(λ^{2j−1}f_λf⁻¹)₋f", 1e-8, Virasoro),
    check("proof_constant_term", "Q_{i,0}² − Q_{i,−1} + e_iiQ_{i,−1} + Q_{i,−1}e_ii = 0", 1e-9, ProofIdentities),
    check("proof_tau_from_xi", "X_{t_{i,j}} = (M⁻¹M_λ)_{ii, −(j+1)}", 1e-9, ProofIdentities),
    check("proof_b_from_q", "B_i = λI − 2Q_i", 1e-9, ProofIdentities),
    check("proof_b_squared", "B_i² = λ²I", 1e-9, ProofIdentities),
    check("proof_b_lambda", "λ∂_λB_i = [P, B_i] + B_i with P = λM_λM⁻¹", 1e-9, ProofIdentities),
    check("proof_trace_b", "tr(B_i ∂_λB_i) = nλ", 1e-9, ProofIdentities),
    check("recovery", "q^{(m)} = W S with C = S R, b = q^{(m)}R, W = bC⁻¹ (and the r mirror)", 1e-6, Recovery),
    check("recovery_k_invariance", "entries of C and b are unchanged by f ↦ kfk⁻¹", 1e-8, Recovery),
    check("trace_pairing", "tr(u^{(i)}u^{(j)}) = q^{(i)}r^{(j)} + q^{(j)}r^{(i)}", 1e-9, Recovery),
    check("trace_vav", "tr(u a u) = 0", 1e-9, Recovery),
];

pub fn lookup(name: &str) -> Option<&'static CheckInfo> {
    CATALOG.iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        for (i, a) in CATALOG.iter().enumerate() {
            assert!(CATALOG[i + 1..].iter().all(|b| b.name != a.name), "{}", a.name);
        }
    }

    #[test]
    fn required_entries() {
        assert!(CATALOG.len() >= 20);
        assert_eq!(lookup("thm7.1_tau_uu").unwrap().anchor, "(ln τ_f)_{t_{i,1}t_{k,1}} = −v_{ik}v_{ki}");
        assert!(lookup("virasoro_bracket").is_some());
    }
}

"""Central registry of the labels attached to every verdict in a report.

Reports never hard-code anchor text; they look it up here by key.
"""

ANCHORS = {
    # tangent structure
    "zero-proj": "tangent structure / 0_M p_M = 1_M",
    "zero-lift": "tangent structure / 0_M l_M = 0_M T(0_M)",
    "lift-proj": "tangent structure / l_M T(p_M) = p_M 0_M",
    "nat-p": "tangent structure / naturality of p",
    "nat-zero": "tangent structure / naturality of 0",
    "nat-lift": "tangent structure / naturality of l",
    "nat-add": "tangent structure / naturality of +",
    "functor-id": "tangent structure / T(1_M) = 1_TM",
    "functor-comp": "tangent structure / T(fg) = T(f)T(g)",
    "add-unit": "additive bundle (p, 0, +) / unit",
    "add-comm": "additive bundle (p, 0, +) / commutativity",
    "add-assoc": "additive bundle (p, 0, +) / associativity",
    "add-proj": "additive bundle (p, 0, +) / + p = pi_1 p",
    "flip-involution": "instance suite / c c = 1",
    "flip-lift": "instance suite / l c = l",
    "flip-proj": "instance suite / c T(p) = p_T",
    "lift-coassoc": "instance suite / l l_T = l T(l)",
    "lift-additive": "instance suite / (l, 0) preserves addition",
    "lift-universal": "instance suite / universality of the vertical lift of TM",
    # differential bundles
    "section": "differential bundle / z q = 1_M",
    "sigma-unit": "differential bundle (cited-definition suite) / <qz, 1> sigma = 1",
    "sigma-comm": "differential bundle (cited-definition suite) / sigma commutative",
    "sigma-assoc": "differential bundle (cited-definition suite) / sigma associative",
    "sigma-proj": "differential bundle (cited-definition suite) / sigma q = pi_1 q",
    "lambda-Tq": "differential bundle / lambda T(q) = q 0_M",
    "lambda-pE": "differential bundle / lambda p_E = q z",
    "lambda-zero": "differential bundle (cited-definition suite) / z lambda = 0_M T(z)",
    "lambda-additive-T": "differential bundle (cited-definition suite) / sigma lambda = <pi_1 lambda, pi_2 lambda> T(sigma)",
    "lambda-additive-E": "differential bundle (cited-definition suite) / sigma lambda = <pi_1 lambda, pi_2 lambda> +_E",
    "lambda-coherence": "differential bundle / lambda l_E = lambda T(lambda)",
    "universality": "vertical lift universality / (E_2 -mu-> TE, q_2, T(q), 0_M) is a pullback",
    "mu-proj": "vertical lift universality / mu p_E = pi_2",
    "wide-pullback": "wide pullbacks E_k exist and are preserved by T^n",
    # construction and classification
    "key-diagram": "diagram of bundles cM -> TM <- TE -> cE <- cM",
    "bundle-limit": "limit of a diagram of bundles / each level E_k has a T^n-preserved limit",
    "construct": "double pullback M x_TM TE x_E M",
    "construct-q": "double pullback / the two projections to M are equal",
    "construct-z": "double pullback / z' = <1_M, z 0_E, 1_M>",
    "construct-sigma": "double pullback / sigma' = 1 x_(+_M) (+_E) x_(1_E) 1",
    "construct-lambda": "double pullback / lambda' = 0_M x_(l_M) l_E x_(0_E) 0_M",
    "construct-V0": "double pullback / V_0 is isomorphic to M via <1_M, z, 1_M>",
    "hypotheses": "double pullbacks over T_k exist and are preserved by T^n",
    "theorem-iso": "classification / <q, lambda, q> is a linear isomorphism over M",
    "sigma-determined": "addition is determined: sigma = <q_2, lambda_2 (+_E)> i_1^-1",
    "corollary-section": "correspondence / z q = 1_M",
    "corollary-wide": "correspondence / wide pullbacks q_k exist and are T^n-preserved",
    "corollary-lift": "correspondence / <T^n q_k, T^n lambda_k, T^n q_k> is an isomorphism",
    "linear-q": "linear map / g q' = q f",
    "linear-z": "linear map / z g = f z'",
    "linear-lambda": "linear map / g lambda' = lambda T(g)",
    "linear-sigma": "linear map (derived) / sigma g = (g x g) sigma'",
    "induced-linear": "induced linear map f x_T(f) T(g) x_g f",
    "counterexample": "linear maps not induced by bundle maps (truncated variant)",
    "classify": "square-zero classification / linear maps over R <-> module maps",
    "tangent-space": "differential objects / tangent space T_z E",
    "chain-rule": "polynomial instance / T(fg) = T(f) T(g)",
}


def anchor(key: str) -> str:
    return ANCHORS[key]

"""
Static reference resources for the ringbif MCP server.

Exposed as MCP resources so assistants can look up the model, the block
structure, the bifurcation formulas, the Morse regions and the sign
conventions without reading the source.
"""

MODEL = """# Ring Model

n elements of circulation 1 sit at the vertices e^{ij zeta} (zeta = 2 pi / n)
of the unit circle; a central element of circulation mu sits at the origin.
Index 0 is the central element.

## Potential (rotating frame)
V(u) = omega/2 * sum_j kappa_j |u_j|^2 - sum_{i<j} kappa_i kappa_j ln|u_j - u_i|

- kappa = (mu, 1, ..., 1)
- s_k = k (n - k) / 2, s_1 = (n - 1) / 2
- omega = s_1 + mu makes the polygon a critical point of V

## Equations of motion
- Vortices:   K J u' = grad V(u)         (u' = -J K^-1 grad V)
- Filaments (traveling waves): K^2 u'' + 2 gamma K J u' = grad V(u)

K = diag(mu I, I, ..., I); J = [[0, -1], [1, 0]] acts on every element.
Both are undefined in the dynamics for mu = 0.

## Periodic problem
With x(t) = u(t / nu) on 2 pi-periodic loops:
- Vortices:  -nu K J x' + grad V(x) = 0
- Filaments: -nu^2 K^2 x'' - 2 gamma nu K J x' + grad V(x) = 0
"""

BLOCKS = """# Hessian Blocks

The isotypic bases W_k (k = 1..n) of the cyclic symmetry block-diagonalize
D^2V at the ring: P* D^2V P = diag(B_1, ..., B_n), with B_{n-k} = conj(B_k).

## Generic blocks (2 x 2), k not in {1, n-1}
B_k = diag(2 omega - s_k, s_k)

## k = 1 (3 x 3, n >= 3), columns (central, peripheral e1, peripheral e2)
    [ mu omega     -a mu       -i a mu ]
    [ -a mu        s_1 + 2 mu   0      ]
    [ i a mu       0            s_1    ]
with a = sqrt(n / 2). B_{n-1} is its complex conjugate.

## n = 2, k = 1 (4 x 4)
    [[omega mu I + 2 mu C, -sqrt(2) mu C], [-sqrt(2) mu C, omega I + mu C]],  C = diag(1, -1)

## Frequency blocks
- Vortices:  m_k(nu) = -nu G_k + B_k
- Filaments: m_k(nu) = nu^2 M_k - 2 gamma nu G_k + B_k

G_k = iJ for generic k, diag(mu, iJ) for k = 1, diag(-mu, iJ) for k = n-1,
diag(mu iJ, iJ) for n = 2. M_k = diag(mu^2, I) where a central column exists.
For mu = 0 the central row and column vanish and are dropped.
"""

BIFURCATIONS = """# Bifurcation Points

A bifurcation frequency nu_0 > 0 of block k is a zero of det m_k where the
Morse index n_k(nu) (number of negative eigenvalues) jumps. The index jump

    eta_k(nu_0) = sigma * (n_k(nu_0 - rho) - n_k(nu_0 + rho)),  sigma = sign(omega)

is reported for every point; a nonzero jump gives a global branch of
periodic solutions with isotropy group Z_n(k) (shift by one element =
rotation by zeta plus time shift by -k zeta).

## Vortex closed forms
- generic k: nu_k = sqrt(4 omega_k (omega - omega_k)) for omega > omega_k = s_k / 2; eta = -1
- k = 1: nu_0 = omega, nu_plus = sqrt(s_1^2 - mu)
- mu = 0, k in {1, n-1}: single point nu = s_1
- n = 2: nu_0 = |mu + 1/2|, nu_1 = sqrt(-3 (mu + 5/4)) for mu < -5/4

## Filament closed forms
- generic k: nu^4 - 2 (2 gamma^2 - omega) nu^2 + 4 omega_k (omega - omega_k) = 0, eta(nu_pm) = pm 1
- k = 1, mu = 1: nu_pm from nu^4 + 2 (omega - 2 gamma^2) nu^2 + omega^2 - 2 omega = 0
  and nu_bar_pm = gamma -+ sqrt(gamma^2 - omega); eta pattern (-1, -1, +1, +1)
- other central blocks: located by scanning the Morse index

## Degeneracies
omega = 0, mu_1 = s_1^2 and mu_k = s_k / 2 - s_1; for n = 2 also mu = -5/4 and mu = -2.
"""

REGIONS = """# Morse Regions of the k = 1 Vortex Block

The (mu, nu) plane is cut by the line nu = nu_0 = mu + s_1, the parabola
nu^2 = s_1^2 - mu and the axis mu = 0. The label's leading digit is the
Morse number n_1.

## n >= 3
- mu > 0: 2b above nu_0; 0a inside the parabola; 1a otherwise
- mu < 0: 1b above nu_plus; inside the parabola 2c (above nu_0) or 1c;
  below nu_minus 1d (above nu_0) or 2a

## n = 2 (in |nu|)
- mu > 0: 1a below nu_0, 2a above
- -1/2 < mu < 0: 1b below nu_0, 2b above
- mu < -1/2: 2b above nu_0; 3a for mu > -5/4; otherwise 2c below nu_1 and,
  between nu_1 and nu_0, 3a for mu > -2 or 1c for mu < -2

Points within 1e-6 of a boundary curve are rejected.
"""

CONVENTIONS = """# Conventions

- Coordinates: (n+1, 2) real arrays, row 0 central; flat order (x0, y0, x1, y1, ...).
- Group action: (shift s, angle theta, phase phi) maps x_j to R(-theta) x_{j+s}
  and, on loops, x(t) to x(t + phi); Fourier mode l picks up e^{i l phi}.
- Isotropy generator of the k-th family: (1, zeta, -k zeta).
- Loops: x(t) = x_0 + sum_l 2 Re(x_l e^{ilt}); amplitude = 2 |x_1|.
- Tolerances: collision 1e-9, zero eigenvalue 1e-9, Newton 1e-10,
  region boundary 1e-6, stability real part 1e-8.
- JSON floats are written at round-trip precision; tables use 8 significant digits.
- Exit codes: 0 success, 1 analysis failure or degeneracy, 2 usage error.
"""


def get_resource(name: str) -> str:
    """Get a reference resource by name."""
    resources = {
        "model": MODEL,
        "blocks": BLOCKS,
        "bifurcations": BIFURCATIONS,
        "regions": REGIONS,
        "conventions": CONVENTIONS,
    }
    return resources.get(name, f"Unknown resource: {name}")


def list_resources() -> list[dict]:
    """List all available reference resources."""
    return [
        {"uri": "reference://model", "name": "Ring Model", "description": "Potential, equations of motion and the periodic problem"},
        {"uri": "reference://blocks", "name": "Hessian Blocks", "description": "Closed-form B_k and the frequency blocks m_k(nu)"},
        {"uri": "reference://bifurcations", "name": "Bifurcation Points", "description": "Closed forms, index jumps and degeneracies"},
        {"uri": "reference://regions", "name": "Morse Regions", "description": "Regions of the (mu, nu) plane for the k = 1 block"},
        {"uri": "reference://conventions", "name": "Conventions", "description": "Coordinates, group action, tolerances and output formats"},
    ]

# Chebyshev algorithm on the exact moments Gamma((k+1)/2)/2 of exp(-x^2) on [0, inf).
# Prints (alpha_k, beta_k) for k < 64; output feeds crates/core/src/special/half_range_table.rs.
from mpmath import mp, mpf, gamma, sqrt
mp.dps = 300
N = 64
mom = [gamma(mpf(k+1)/2)/2 for k in range(2*N)]
alpha = [mpf(0)]*N; beta=[mpf(0)]*N
sig_prev = [mpf(0)]*(2*N)
sig = mom[:]
alpha[0] = mom[1]/mom[0]; beta[0]=mom[0]
sigs = [sig_prev, sig]
for k in range(1, N):
    sm1 = sigs[-2]; s0 = sigs[-1]
    new = [mpf(0)]*(2*N)
    for l in range(k, 2*N-k):
        new[l] = s0[l+1] - alpha[k-1]*s0[l] - beta[k-1]*sm1[l]
    alpha[k] = new[k+1]/new[k] - s0[k]/s0[k-1]
    beta[k] = new[k]/s0[k-1]
    sigs.append(new)
for k in range(N):
    print(mp.nstr(alpha[k], 20, min_fixed=-5, max_fixed=5), mp.nstr(beta[k], 20, min_fixed=-5, max_fixed=5))

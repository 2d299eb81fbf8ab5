# %% [markdown]
# One eigenvalue read out four ways, then estimated from sampled shots.

# %%
import math

import numpy as np

from fockforge import measure

A = measure.Observable.diagonal([0, 1, 2, 3, 4, 5, 6, 7])
state = np.eye(8)[5]

# %% an eight-site pointer lands exactly on the eigenvalue
print(np.round(measure.von_neumann_measure(A, state, 8).distribution, 12))

# %% the one-qubit schemes share the cosine law
t = 0.4
lam = 5.0
print("kitaev  ", measure.kitaev_circuit(A, t, state).distribution)
print("kickback", measure.phase_kickback_circuit(lam, t).distribution)
print("ramsey  ", measure.ramsey_protocol(lam, t, "pi-half").distribution)
print("cos law ", (1 + math.cos(lam * t)) / 2)

# %% the pointer picture on two sites generates the same circuit
print("generator gap", measure.generator_identity_check(A, 1.3))

# %% estimate from shots; the answer is only defined modulo the window
est = measure.estimate_eigenvalue(measure.Observable.diagonal([1.25]), [1.0],
                                  [8, 4, 2, 1, 0.5, 0.25, 0.125], 4096, seed=11)
print(est.value, "window", est.window)

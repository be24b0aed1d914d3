"""Binary RBF SVM on a 2-point toy problem with a known closed form.

With z1=(1,0) y=+1 and z2=(-1,0) y=-1 the dual reduces to one variable:
maximize 2a - a^2(1 - K12), so a* = 1/(1 - K12) and the threshold is 0.
"""

import numpy as np

from imgprov.svm import smo_train, svm_decision

x = np.array([[1.0, 0.0], [-1.0, 0.0]])
y = np.array([1.0, -1.0])
gamma = 0.1

model = smo_train(x, y, c=10.0, gamma=gamma)
k12 = np.exp(-gamma * 4.0)
print("analytic alpha:", 1.0 / (1.0 - k12))
print("solver alphas: ", np.abs(model.dual_coeffs))
print("bias:          ", model.bias)
print("decision(z1) =", svm_decision(model, x[0]))
print("decision(z2) =", svm_decision(model, x[1]))
print("decision(midline point) =", svm_decision(model, np.array([0.0, 5.0])))
print("converged in", model.passes, "passes")

"""Named example objects available to every CLI document.

These are the standard counterexamples and test objects of the Hahn space
theory; the acceptance tests and the mode-monotonicity check run over all
sequences defined here.
"""

DOCUMENT = """\
# counterexamples
seq rowinv = piece(k==1, 1/l) piece(true, 0)
seq rowtele = piece(k==1, 1/(l*(l+1))) piece(true, 0)
seq rowones = piece(k==1, 1) piece(true, 0)
seq diag float = piece(k==l, 1/(k*l)) piece(true, 0)
seq invsq = 1/(k*l)^2
seq inv = 1/(k*l)
# limits and boundedness
seq ones = e
seq kseq = k
seq colk = piece(l==1, k) piece(true, 0)
seq rowalt = piece(k==1, (-1)^l) piece(true, 0)
seq alt = (-1)^(k+l)
seq row1 = e_row(1)
seq col2 = e_col(2)
seq unit23 = e_unit(2, 3)
seq block22 = e_block(2, 2)
seq blockavg = [[1/4, 1/4], [1/4, 1/4]]
seq g = [[3, -7], [2, 0]]
seq nothing = zero
seq decay = 1/(k+l)
seq shifted = 1 + 1/(k*l)
# matrices
mat T = T
mat Tguard = 1/(m*n) where k<=m and l<=n
mat colm = piece(k==1 and l==1, m) piece(true, 0)
mat single = [[[[1]]]]
mat ident = piece(k==m and l==n, 1) piece(true, 0)
"""

SEQUENCES = tuple(line.split()[1] for line in DOCUMENT.splitlines() if line.startswith("seq "))
MATRICES = tuple(line.split()[1] for line in DOCUMENT.splitlines() if line.startswith("mat "))

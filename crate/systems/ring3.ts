state a init {p}
state b {}
state c {}
edge a b
edge b c
edge c a

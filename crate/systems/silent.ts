# Requests are never answered.
state a init {req}
state b {}
edge a b
edge b a

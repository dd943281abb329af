state s init {p}
edge s s

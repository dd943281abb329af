# A request is answered eventually only if the server leaves `w`.
state i init {}
state r {req}
state w {}
state a {resp}
edge i i
edge i r
edge r w
edge w w
edge w a
edge a i

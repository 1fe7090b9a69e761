/* planted: c->refs is written under ref_lock in 7 of 8 places; the last write is bare */

void set_1(struct ctl *c)
{
	mutex_lock(&ref_lock);
	c->refs = 1;
	mutex_unlock(&ref_lock);
}

void set_2(struct ctl *c)
{
	mutex_lock(&ref_lock);
	c->refs = 2;
	mutex_unlock(&ref_lock);
}

void set_3(struct ctl *c)
{
	mutex_lock(&ref_lock);
	c->refs = 3;
	mutex_unlock(&ref_lock);
}

void set_4(struct ctl *c)
{
	mutex_lock(&ref_lock);
	c->refs = 4;
	mutex_unlock(&ref_lock);
}

void set_5(struct ctl *c)
{
	mutex_lock(&ref_lock);
	c->refs = 5;
	mutex_unlock(&ref_lock);
}

void set_6(struct ctl *c)
{
	mutex_lock(&ref_lock);
	c->refs = 6;
	mutex_unlock(&ref_lock);
}

void set_7(struct ctl *c)
{
	mutex_lock(&ref_lock);
	c->refs = 7;
	mutex_unlock(&ref_lock);
}

void set_8(struct ctl *c)
{
	c->refs = 8;
}
